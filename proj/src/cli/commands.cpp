#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bjj/bjj.hpp"

namespace bjj::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) { return format_double(x); }

std::string short_fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

nlohmann::ordered_json gates_json(const std::vector<Gate>& gates) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& g : gates) arr.push_back({{"name", g.name}, {"pass", g.pass}, {"detail", g.detail}});
  return arr;
}

void report_gates(const std::vector<Gate>& gates, std::ostream& log) {
  for (const auto& g : gates) log << (g.pass ? "[pass] " : "[FAIL] ") << g.name << ": " << g.detail << '\n';
}

std::filesystem::path with_extension(std::filesystem::path p, Format f) {
  p += f == Format::csv ? ".csv" : ".jsonl";
  return p;
}

}  // namespace

bool all_pass(const std::vector<Gate>& gates) {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

NoiseModel<double> make_noise_model(const RunConfig& c) {
  switch (noise_kind_from_string(c.noise.kind)) {
    case NoiseKind::gaussian_ou: return NoiseModel<double>::ornstein_uhlenbeck(c.lambda_bar, c.noise.h0, c.noise.Tc);
    case NoiseKind::gaussian_white: return NoiseModel<double>::white(c.lambda_bar, c.noise.D);
    case NoiseKind::gaussian_quasistatic: return NoiseModel<double>::quasistatic(c.lambda_bar, c.noise.h0);
    case NoiseKind::gaussian_custom: break;
  }
  throw ConfigError("gaussian-custom noise cannot be configured from a file");
}

VisibilityData visibility_data(const RunConfig& c) {
  VisibilityData out;
  const auto model = make_noise_model(c);
  const auto initial = make_coherent<double>(c.N, kPi / 2, 0);
  for (double chi : c.chi) {
    const QuenchSpec<double> spec(c.N, chi, c.lambda_bar);
    for (double t : c.time.points()) {
      const double nu0 = visibility_closed_form(spec, t);
      const double nu_noisy = visibility_noisy_closed_form(spec, model, t);
      const double nu_matrix = visibility(noisy_density_matrix(initial, spec, model, t));
      out.max_matrix_deviation = std::max(out.max_matrix_deviation, std::abs(nu_matrix - nu_noisy));
      out.table.add_row({t, nu0, nu_noisy, nu_matrix, chi});
    }
  }
  out.gates.push_back({"matrix pipeline equals closed form", out.max_matrix_deviation < 1e-10,
                       "max |nu_matrix - nu_noisy| = " + fmt(out.max_matrix_deviation) + " (limit 1e-10)"});
  return out;
}

CatRelaxationData cat_relaxation_data(const RunConfig& c) {
  CatRelaxationData out;
  const double chi = c.chi.front();
  const int companion = 2 * c.q;
  const FockBasis basis(c.N);
  const auto rho_inf = steady_state<double>(c.N);
  const double q_inf = q_infinity_exact<double>(c.N, kPi / 2);

  constexpr int kPhiPoints = 360;
  std::vector<double> phis(kPhiPoints);
  for (int k = 0; k < kPhiPoints; ++k) phis[k] = 2 * kPi * k / kPhiPoints;

  auto entries = nlohmann::ordered_json::array();
  auto pairs = nlohmann::ordered_json::array();
  auto warnings = nlohmann::ordered_json::array();

  for (int q : {c.q, companion}) {
    const CatSpec<double> cat(QuenchSpec<double>(c.N, chi, c.lambda_bar), q);
    const auto rho0 = DensityMatrix<double>::from_pure(cat_state(cat));
    for (double a_primary : c.a_values) {
      const double a = q == c.q ? a_primary : markov_matched_amplitude(a_primary, c.q, q);
      if (q == companion)
        pairs.push_back({{"q", c.q}, {"a", a_primary}, {"q_companion", q}, {"a_companion", a}});

      const auto rho = apply_dephasing(rho0, a * a);
      const auto parts = decompose(rho, q);
      const auto rho_d = DensityMatrix<double>::unchecked(basis, parts.diagonal);
      const double td = trace_distance(rho_d, rho_inf);
      const double weight = offdiag_weight(parts.off_diagonal);
      const double fq = fisher_information(rho).value;
      entries.push_back({{"q", q}, {"a", a}, {"trace_distance", td}, {"offdiag_weight", weight}, {"F_Q", fq}});

      for (const auto* part : {&parts.diagonal, &parts.off_diagonal}) {
        const std::string name = part == &parts.diagonal ? "d" : "od";
        for (Eigen::Index i = 0; i < part->rows(); ++i)
          for (Eigen::Index j = 0; j < part->cols(); ++j) {
            const auto z = (*part)(i, j);
            out.matrices.add_row({static_cast<long long>(q), a, name,
                                  static_cast<long long>(i) - c.N / 2, static_cast<long long>(j) - c.N / 2,
                                  z.real(), z.imag(), std::abs(z)});
          }
      }

      std::vector<double> scan(kPhiPoints);
      for (int k = 0; k < kPhiPoints; ++k) {
        scan[k] = husimi(rho_d, kPi / 2, phis[k]);
        // no theta3 profile at a = 0 (nome 1)
        const double approx = q == 2 && a > 0 ? husimi_q2_approx<double>(c.N, a, c.lambda_bar, chi, kPi / 2, phis[k])
                                     : std::nan("");
        out.husimi.add_row({static_cast<long long>(q), a, phis[k], scan[k], husimi(rho, kPi / 2, phis[k]), approx});
      }
      if (q == 2)
        for (const auto& w : husimi_q2_approx_warnings(c.N, a)) warnings.push_back(w + " (a = " + short_fmt(a) + ")");

      if (q != 2) continue;
      if (a == 0 && c.lambda_bar == 0) {
        const double peak = *std::max_element(scan.begin(), scan.end());
        const bool at_0 = scan[0] >= peak * (1 - 1e-12);
        const bool at_pi = scan[kPhiPoints / 2] >= peak * (1 - 1e-12);
        out.gates.push_back({"noiseless Husimi peaks at phi = 0 and pi", at_0 && at_pi,
                             "Q(0) = " + fmt(scan[0]) + ", Q(pi) = " + fmt(scan[kPhiPoints / 2]) +
                                 ", max = " + fmt(peak)});
      }
      if (a >= 2.5) {
        double worst = 0;
        for (double v : scan) worst = std::max(worst, std::abs(v - q_inf) / q_inf);
        out.gates.push_back({"strong-noise Husimi flat at Q_inf(pi/2), a = " + fmt(a), worst < 0.01,
                             "max relative deviation " + fmt(worst) + " (limit 0.01)"});
      }
    }
  }

  out.summary = {{"command", "cat-relaxation"},
                 {"N", c.N},
                 {"chi", chi},
                 {"lambda_bar", c.lambda_bar},
                 {"q", {c.q, companion}},
                 {"Q_inf_pi_2", q_inf},
                 {"entries", entries},
                 {"markov_pairs", pairs},
                 {"warnings", warnings},
                 {"gates", gates_json(out.gates)},
                 {"pass", all_pass(out.gates)}};
  return out;
}

FisherScanData fisher_scan_data(const RunConfig& c) {
  FisherScanData out;
  const CatSpec<double> cat(QuenchSpec<double>(c.N, c.chi.front(), c.lambda_bar), c.q);
  const auto rho0 = DensityMatrix<double>::from_pure(cat_state(cat));
  const double ceiling = double(c.N) * c.N * (1 + 1e-9);
  bool bounded = true;
  for (double a : c.a_values) {
    const auto fr = fisher_information(apply_dephasing(rho0, a * a));
    bounded = bounded && fr.value >= -1e-9 && fr.value <= ceiling;
    out.table.add_row({a, fr.value, fr.direction.x(), fr.direction.y(), fr.direction.z(),
                       sensitivity_gain_db(c.N, fr.value)});
  }
  out.gates.push_back({"0 <= F_Q <= N^2", bounded, bounded ? "all rows within bounds" : "a row exceeds bounds"});
  return out;
}

McValidation mc_validation(const RunConfig& c, bool keep_ensemble) {
  McValidation out;
  const auto model = make_noise_model(c);
  const QuenchSpec<double> spec(c.N, c.chi.front(), c.lambda_bar);
  const QuenchSpec<double> chi_only(c.N, c.chi.front(), 0);
  const auto times = c.time.points();
  const double t_max = *std::max_element(times.begin(), times.end());
  auto ensemble = sample_trajectories(model, t_max, c.mc.dt, static_cast<Eigen::Index>(c.mc.M), c.mc.seed,
                                      c.threads);
  for (double t : times) ensemble.step_of(t);  // off-grid times throw before any matrix is built

  const auto initial = make_coherent<double>(c.N, kPi / 2, 0);
  const double bound = 5 / std::sqrt(static_cast<double>(c.mc.M));
  auto rows = nlohmann::ordered_json::array();
  bool pass = true;
  for (double t : times) {
    const auto mc = mc_density_matrix(initial, spec, ensemble, t);
    const auto rho0 = DensityMatrix<double>::from_pure(evolve_noiseless(initial, chi_only, t));
    const auto analytic = apply_dephasing(rho0, model, t);
    const double dev = (mc.elements() - analytic.elements()).cwiseAbs().maxCoeff();
    pass = pass && dev < bound;
    rows.push_back({{"t", t}, {"max_deviation", dev}, {"pass", dev < bound}});
  }
  out.gates.push_back({"Monte-Carlo within 5/sqrt(M)", pass, "bound " + fmt(bound)});
  out.report = {{"command", "mc-validate"},
                {"N", c.N},
                {"chi", c.chi.front()},
                {"lambda_bar", c.lambda_bar},
                {"noise", c.noise.kind},
                {"M", c.mc.M},
                {"dt", c.mc.dt},
                {"seed", c.mc.seed},
                {"bound", bound},
                {"times", rows},
                {"pass", pass}};
  if (keep_ensemble) out.ensemble = std::move(ensemble);
  return out;
}

int run_command(const RunConfig& c, std::ostream& log, const std::optional<std::filesystem::path>& ensemble_out) {
  validate(c);
  const std::filesystem::path out = c.output.path;
  std::vector<Gate> gates;
  if (c.command == "visibility") {
    auto data = visibility_data(c);
    write_file_atomic(out, data.table.render(c.output.format));
    gates = data.gates;
  } else if (c.command == "cat-relaxation") {
    auto data = cat_relaxation_data(c);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory '" + out.string() + "'");
    write_file_atomic(with_extension(out / "matrices", c.output.format), data.matrices.render(c.output.format));
    write_file_atomic(with_extension(out / "husimi", c.output.format), data.husimi.render(c.output.format));
    write_file_atomic(out / "summary.json", data.summary.dump(2) + "\n");
    for (const auto& w : data.summary["warnings"]) log << "warning: " << w.get<std::string>() << '\n';
    gates = data.gates;
  } else if (c.command == "fisher-scan") {
    auto data = fisher_scan_data(c);
    write_file_atomic(out, data.table.render(c.output.format));
    gates = data.gates;
  } else if (c.command == "mc-validate") {
    auto data = mc_validation(c, ensemble_out.has_value());
    write_file_atomic(out, data.report.dump(2) + "\n");
    if (ensemble_out) write_file_atomic(*ensemble_out, ensemble_table(*data.ensemble).render(c.output.format));
    gates = data.gates;
  } else {
    throw ConfigError("unknown command '" + c.command + "'");
  }
  report_gates(gates, log);
  return all_pass(gates) ? kExitOk : kExitGateFailed;
}

int exit_code_for_current_exception(std::ostream& err) {
  try {
    throw;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedConfiguration& e) {
    err << "unsupported configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace bjj::cli
