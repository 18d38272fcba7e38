#include "anchorsim/ranging.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "anchorsim/errors.hpp"

namespace anchorsim {

double RangingNoiseModel::sigma_at(double rho) const {
  if (sigma_table.empty()) return sigma_rho;
  if (rho <= sigma_table.front().first) return sigma_table.front().second;
  if (rho >= sigma_table.back().first) return sigma_table.back().second;
  for (std::size_t i = 0; i + 1 < sigma_table.size(); ++i) {
    const auto& [r0, s0] = sigma_table[i];
    const auto& [r1, s1] = sigma_table[i + 1];
    if (rho <= r1) return s0 + (s1 - s0) * (rho - r0) / (r1 - r0);
  }
  return sigma_table.back().second;
}

RangingStream::RangingStream(const RangingNoiseModel& model,
                             std::uint64_t stream_id)
    : model_(model), engine_(derive_seed(model.seed, stream_id)) {
  if (model_.sigma_rho <= 0.0)
    throw InputError("sigma_rho must be positive");
  for (const auto& [rho, sigma] : model_.sigma_table)
    if (sigma <= 0.0 || rho < 0.0)
      throw InputError("sigma table entries must have rho >= 0, sigma > 0");
  if (!std::is_sorted(model_.sigma_table.begin(), model_.sigma_table.end()))
    throw InputError("sigma table must be sorted by distance");
}

double RangingStream::range_true_anchor(Point2 a_true, Point2 s) {
  const double rho = distance(s, a_true);
  return rho + model_.bias_at(rho) + model_.sigma_at(rho) * unit_normal_(engine_);
}

double RangingStream::range_deployed_anchor(Point2 a_hat, Point2 delta,
                                            Point2 s) {
  // the physically placed anchor sits at a_hat - delta
  return range_true_anchor(a_hat - delta, s);
}

std::pair<double, double> fit_bias_model(
    std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 2)
    throw InputError("bias fit needs at least 2 samples");
  double sx = 0.0, sy = 0.0;
  for (const auto& [rho, measured] : samples) {
    sx += rho;
    sy += measured - rho;
  }
  const double n = static_cast<double>(samples.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [rho, measured] : samples) {
    sxx += (rho - mx) * (rho - mx);
    sxy += (rho - mx) * (measured - rho - my);
  }
  if (sxx <= 1e-15 * (1.0 + mx * mx))
    throw InputError("bias fit needs at least 2 distinct distances");
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

std::vector<std::pair<double, double>> load_calibration_csv(
    const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw InputError("cannot open calibration csv: " + filename);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<double, double>> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "true_distance,measured")
        throw InputError(
            "calibration csv must start with header 'true_distance,measured'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw InputError("missing comma at line " + std::to_string(line_no));
    auto parse = [&](const std::string& tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{})
        throw InputError("bad number '" + tok + "' at line " +
                         std::to_string(line_no));
      return v;
    };
    out.emplace_back(parse(line.substr(0, comma)), parse(line.substr(comma + 1)));
  }
  return out;
}

double propagated_sigma_eta(double sigma_rho, const Eigen::RowVector2d& F,
                            const Eigen::Matrix2d& Xi) {
  const double asym = (Xi - Xi.transpose()).norm();
  if (asym > 1e-9 * (1.0 + Xi.norm()))
    throw InputError("placement covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(Xi);
  if (eig.eigenvalues().minCoeff() < -1e-12 * (1.0 + Xi.norm()))
    throw InputError("placement covariance is not positive semidefinite");
  return sigma_rho * sigma_rho + (F * Xi * F.transpose())(0, 0);
}

}  // namespace anchorsim
