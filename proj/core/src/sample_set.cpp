#include "vcmc/sample_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace vcmc {

void SubposteriorSampleSet::truncate_to_common_length() {
  if (draws.empty()) return;
  std::size_t min_t = draws.front().size();
  for (const auto& list : draws) min_t = std::min(min_t, list.size());
  for (auto& list : draws) list.resize(min_t);
}

SubposteriorMoments compute_moments(const SubposteriorSampleSet& samples) {
  SubposteriorMoments out;
  const int dim = samples.shape.size();
  for (const auto& list : samples.draws) {
    if (list.size() < 2) {
      throw std::invalid_argument("compute_moments: need >= 2 draws per partition");
    }
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& theta : list) {
      mu += theta;
      s.selfadjointView<Eigen::Lower>().rankUpdate(theta);
    }
    const double t = static_cast<double>(list.size());
    mu /= t;
    s = Eigen::MatrixXd(s.selfadjointView<Eigen::Lower>()) / t;
    out.mean.push_back(std::move(mu));
    out.second_moment.push_back(std::move(s));
  }
  return out;
}

const SubposteriorMoments& cached_moments(SubposteriorSampleSet& samples) {
  if (!samples.moment_cache) {
    samples.moment_cache = compute_moments(samples);
  }
  return *samples.moment_cache;
}

}  // namespace vcmc
