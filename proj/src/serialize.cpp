#include "emi/serialize.hpp"

#include <fstream>
#include <utility>
#include <vector>

#include "emi/version.hpp"

namespace emi {

namespace {

using nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& e : arr) {
    v(i++) = e.get<double>();
  }
  return v;
}

const char* mode_name(bspline::SplineMode mode) {
  return mode == bspline::SplineMode::shared ? "shared" : "per_dim";
}

bspline::SplineMode mode_from_name(const std::string& name) {
  if (name == "shared") {
    return bspline::SplineMode::shared;
  }
  if (name == "per_dim") {
    return bspline::SplineMode::per_dim;
  }
  throw DomainError("unknown spline mode: " + name);
}

const char* exceedance_mode_name(ExceedanceMode mode) {
  return mode == ExceedanceMode::query_threshold ? "query_threshold"
                                                 : "residual";
}

ExceedanceMode exceedance_mode_from_name(const std::string& name) {
  if (name == "query_threshold") {
    return ExceedanceMode::query_threshold;
  }
  if (name == "residual") {
    return ExceedanceMode::residual;
  }
  throw DomainError("unknown exceedance mode: " + name);
}

json interpolator_to_json(const bspline::Interpolator& itp) {
  json doc;
  doc["degree"] = itp.dims().front().degree();
  doc["mode"] = mode_name(itp.mode());
  json knots = json::array();
  for (const auto& kv : itp.dims()) {
    knots.push_back(kv.knots());
  }
  doc["knots"] = std::move(knots);
  doc["coefficients"] = vector_to_json(itp.coefficients());
  doc["fallback_values"] = itp.fallback_values();
  return doc;
}

bspline::Interpolator interpolator_from_json(const json& doc) {
  const int degree = doc.at("degree").get<int>();
  std::vector<bspline::KnotVector> dims;
  for (const auto& k : doc.at("knots")) {
    dims.emplace_back(k.get<std::vector<double>>(), degree);
  }
  return bspline::Interpolator(
      std::move(dims), vector_from_json(doc.at("coefficients")),
      doc.at("fallback_values").get<std::vector<std::vector<double>>>(),
      mode_from_name(doc.at("mode").get<std::string>()));
}

json config_to_json(const EmiConfig& cfg) {
  json doc;
  doc["solver"] = {{"tol_primal", cfg.solver.tol_primal},
                   {"tol_dual", cfg.solver.tol_dual},
                   {"tol_complementarity", cfg.solver.tol_complementarity},
                   {"max_iterations", cfg.solver.max_iterations}};
  doc["tail"] = {{"min_exceedances", cfg.tail.min_exceedances},
                 {"gamma_lo", cfg.tail.gamma_lo},
                 {"gamma_hi", cfg.tail.gamma_hi},
                 {"coarse_grid_points", cfg.tail.coarse_grid_points},
                 {"tol_gamma", cfg.tail.tol_gamma},
                 {"tol_log_sigma", cfg.tail.tol_log_sigma},
                 {"max_line_search_iterations",
                  cfg.tail.max_line_search_iterations}};
  doc["spline_degree"] = cfg.spline_degree;
  doc["n_interior_knots"] = cfg.n_interior_knots;
  doc["spline_mode"] = mode_name(cfg.spline_mode);
  doc["exceedance_mode"] = exceedance_mode_name(cfg.exceedance_mode);
  doc["exceedance_floor"] = cfg.exceedance_floor;
  doc["sigma_floor"] = cfg.sigma_floor;
  doc["max_failure_fraction"] = cfg.max_failure_fraction;
  return doc;
}

EmiConfig config_from_json(const json& doc) {
  EmiConfig cfg;
  const json& s = doc.at("solver");
  cfg.solver.tol_primal = s.at("tol_primal").get<double>();
  cfg.solver.tol_dual = s.at("tol_dual").get<double>();
  cfg.solver.tol_complementarity = s.at("tol_complementarity").get<double>();
  cfg.solver.max_iterations = s.at("max_iterations").get<int>();
  const json& t = doc.at("tail");
  cfg.tail.min_exceedances = t.at("min_exceedances").get<std::size_t>();
  cfg.tail.gamma_lo = t.at("gamma_lo").get<double>();
  cfg.tail.gamma_hi = t.at("gamma_hi").get<double>();
  cfg.tail.coarse_grid_points = t.at("coarse_grid_points").get<int>();
  cfg.tail.tol_gamma = t.at("tol_gamma").get<double>();
  cfg.tail.tol_log_sigma = t.at("tol_log_sigma").get<double>();
  cfg.tail.max_line_search_iterations =
      t.at("max_line_search_iterations").get<int>();
  cfg.spline_degree = doc.at("spline_degree").get<int>();
  cfg.n_interior_knots = doc.at("n_interior_knots").get<int>();
  cfg.spline_mode = mode_from_name(doc.at("spline_mode").get<std::string>());
  cfg.exceedance_mode =
      exceedance_mode_from_name(doc.at("exceedance_mode").get<std::string>());
  cfg.exceedance_floor = doc.at("exceedance_floor").get<double>();
  cfg.sigma_floor = doc.at("sigma_floor").get<double>();
  cfg.max_failure_fraction = doc.at("max_failure_fraction").get<double>();
  return cfg;
}

json report_to_json(const FitReport& report) {
  json failures = json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"index", f.index}, {"reason", f.reason}});
  }
  return {{"n_points", report.n_points},
          {"n_failures", report.n_failures},
          {"failures", std::move(failures)},
          {"gamma_residual_norm", report.gamma_residual_norm},
          {"sigma_residual_norm", report.sigma_residual_norm}};
}

FitReport report_from_json(const json& doc) {
  FitReport report;
  report.n_points = doc.at("n_points").get<std::size_t>();
  report.n_failures = doc.at("n_failures").get<std::size_t>();
  for (const auto& f : doc.at("failures")) {
    report.failures.push_back({f.at("index").get<std::size_t>(),
                               f.at("reason").get<std::string>()});
  }
  report.gamma_residual_norm = doc.at("gamma_residual_norm").get<double>();
  report.sigma_residual_norm = doc.at("sigma_residual_norm").get<double>();
  return report;
}

}  // namespace

nlohmann::json model_to_json(const EmiModel& model) {
  json doc;
  doc["format"] = "emi-model";
  doc["format_version"] = kModelFormatVersion;
  doc["tool_version"] = kVersion;
  doc["tau0"] = model.tau0;
  doc["qr"] = {{"tau", model.qr.tau},
               {"alpha", model.qr.alpha},
               {"beta", vector_to_json(model.qr.beta)}};
  doc["gamma_surface"] = interpolator_to_json(model.gamma_itp);
  doc["sigma_surface"] = interpolator_to_json(model.sigma_itp);
  doc["offline_summary"] = {{"min", vector_to_json(model.summary.min)},
                            {"max", vector_to_json(model.summary.max)}};
  doc["config"] = config_to_json(model.config);
  doc["fit_report"] = report_to_json(model.report);
  return doc;
}

EmiModel model_from_json(const nlohmann::json& doc) {
  if (doc.at("format").get<std::string>() != "emi-model") {
    throw DomainError("not an emi model document");
  }
  if (doc.at("format_version").get<int>() != kModelFormatVersion) {
    throw DomainError("unsupported model format version");
  }
  quantreg::QuantileFit qr;
  qr.tau = doc.at("qr").at("tau").get<double>();
  qr.alpha = doc.at("qr").at("alpha").get<double>();
  qr.beta = vector_from_json(doc.at("qr").at("beta"));
  EmiModel model{qr,
                 interpolator_from_json(doc.at("gamma_surface")),
                 interpolator_from_json(doc.at("sigma_surface")),
                 doc.at("tau0").get<double>(),
                 OfflineSummary{
                     vector_from_json(doc.at("offline_summary").at("min")),
                     vector_from_json(doc.at("offline_summary").at("max"))},
                 config_from_json(doc.at("config")),
                 report_from_json(doc.at("fit_report"))};
  return model;
}

void save_model(const EmiModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot open model file for writing: " + path);
  }
  out << model_to_json(model).dump(2) << '\n';
  if (!out) {
    throw Error("failed writing model file: " + path);
  }
}

EmiModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open model file: " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error("malformed model file " + path + ": " + e.what());
  }
  try {
    return model_from_json(doc);
  } catch (const json::exception& e) {
    throw Error("invalid model document " + path + ": " + e.what());
  }
}

}  // namespace emi
