#pragma once

#include "bjj/dynamics.hpp"
#include "bjj/errors.hpp"
#include "bjj/hilbert.hpp"
#include "bjj/noise.hpp"
#include "bjj/observables.hpp"
