#include "psq/model.h"

#include "psq/errors.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace psq {

QueueParameters::QueueParameters(double rho)
    : rho_(rho),
      sqrt_rho_(std::sqrt(rho)),
      support_bound_(2.0 * std::sqrt(rho) / (1.0 + rho)),
      z0_((1.0 + rho) * (1.0 + rho) / (4.0 * rho)),
      // log1p form keeps the rate accurate as rho -> 1, where 4 rho/(1+rho)^2 -> 1.
      decay_rate_(std::log1p(-((1.0 - rho) * (1.0 - rho)) / ((1.0 + rho) * (1.0 + rho)))) {}

double QueueParameters::stationary_weight(int n) const {
    if (n < 0) return 0.0;
    return (1.0 - rho_) * std::pow(rho_, n);
}

QueueParameters validate_params(double rho) {
    if (!std::isfinite(rho)) {
        throw DomainError("load rho must be finite");
    }
    if (rho <= 0.0) {
        throw DomainError("load rho must satisfy rho > 0, got " + describe(rho));
    }
    if (rho >= 1.0) {
        throw DomainError("load rho must satisfy rho < 1 (stability), got " + describe(rho));
    }
    return QueueParameters(rho);
}

void TruncationConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("truncation epsilon must be positive");
    }
    if (n_cap < 1) {
        throw DomainError("truncation n_cap must be >= 1");
    }
    if (!(series_tol > 0.0) || !std::isfinite(series_tol)) {
        throw DomainError("series tolerance must be positive");
    }
}

namespace {
constexpr double kEntrySlack = 1e-12;
}

Pmf::Pmf(int offset, std::vector<double> probs, double tail_mass)
    : offset_(offset), probs_(std::move(probs)), tail_mass_(tail_mass) {
    for (double& p : probs_) {
        if (!std::isfinite(p) || p < -kEntrySlack || p > 1.0 + kEntrySlack) {
            throw DomainError("probability entry outside [0,1]: " + describe(p));
        }
        p = std::clamp(p, 0.0, 1.0);
    }
    if (!std::isfinite(tail_mass_) || tail_mass_ < -1e-9) {
        throw DomainError("negative tail mass: " + describe(tail_mass_));
    }
    tail_mass_ = std::max(tail_mass_, 0.0);
}

double Pmf::at(int j) const noexcept {
    const int i = j - offset_;
    if (i < 0 || i >= static_cast<int>(probs_.size())) return 0.0;
    return probs_[static_cast<std::size_t>(i)];
}

double Pmf::total() const noexcept {
    return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

bool Pmf::is_normalized(double tol) const noexcept {
    return std::abs(total() + tail_mass_ - 1.0) <= tol;
}

MeanEstimate pmf_mean(const Pmf& p) {
    MeanEstimate m;
    const auto probs = p.probs();
    for (std::size_t i = 0; i < probs.size(); ++i) {
        m.mean += static_cast<double>(p.offset() + static_cast<int>(i)) * probs[i];
    }
    m.unresolved_tail = p.tail_mass() * static_cast<double>(p.max_index() + 1);
    return m;
}

ArrivalsDepartures alpha_delta_from_path(int n0, int kappa, int nu) {
    if (n0 < 0 || nu < 0 || kappa < 1) {
        throw InconsistentPathError("path requires n0 >= 0, nu >= 0, kappa >= 1");
    }
    const int twice_alpha = kappa + nu - n0 - 1;
    const int twice_delta = kappa - nu + n0 - 1;
    if (twice_alpha < 0 || twice_delta < 0) {
        throw InconsistentPathError("path has a negative arrival or departure count");
    }
    if (twice_alpha % 2 != 0) {
        throw InconsistentPathError("kappa + nu - n0 - 1 must be even");
    }
    return {twice_alpha / 2, twice_delta / 2};
}

}  // namespace psq
