#include "graphband/tsallis_inf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "graphband/errors.hpp"

namespace graphband {

namespace {

// Weight sum as a function of the offset u = min_i L_i - x > 0, using the
// translated estimates d_i = L_i - min_j L_j >= 0. Strictly decreasing in u,
// from +inf (u -> 0) to 0, so the root is unique.
double weight_sum(const std::vector<double>& d, double eta, double u) {
    double s = 0.0;
    for (double di : d) {
        double z = eta * (di + u);
        s += 4.0 / (z * z);
    }
    return s;
}

double weight_sum_slope(const std::vector<double>& d, double eta, double u) {
    double s = 0.0;
    for (double di : d) {
        double z = di + u;
        s += 8.0 / (eta * eta * z * z * z);
    }
    return -s;
}

}  // namespace

std::vector<double> tsallis_weights(const std::vector<double>& cum_loss_est, double eta) {
    const size_t k = cum_loss_est.size();
    if (k == 0) throw std::invalid_argument("arm count must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("learning rate must be positive");

    const double lmin = *std::min_element(cum_loss_est.begin(), cum_loss_est.end());
    std::vector<double> d(k);
    for (size_t i = 0; i < k; ++i) d[i] = cum_loss_est[i] - lmin;

    // At u0 = 2*sqrt(K)/eta the minimum-estimate term equals 1/K and every
    // other term is smaller, so the sum is <= 1: u0 sits at or right of the
    // root. Bracket is (lo, hi] with sum(lo) > 1 >= sum(hi).
    double hi = 2.0 * std::sqrt(static_cast<double>(k)) / eta;
    double lo = 0.0;
    double u = hi;
    double s = weight_sum(d, eta, u);

    const double tol = 1e-12;  // headroom below the 1e-9 contract
    bool converged = std::abs(s - 1.0) <= tol;
    for (int it = 0; it < 100 && !converged; ++it) {
        if (s > 1.0)
            lo = u;
        else
            hi = u;
        double step = (s - 1.0) / weight_sum_slope(d, eta, u);
        double cand = u - step;
        u = (cand > lo && cand < hi) ? cand : 0.5 * (lo + hi);
        s = weight_sum(d, eta, u);
        converged = std::abs(s - 1.0) <= tol;
    }
    for (int it = 0; it < 200 && !converged; ++it) {
        if (s > 1.0)
            lo = u;
        else
            hi = u;
        u = 0.5 * (lo + hi);
        s = weight_sum(d, eta, u);
        converged = std::abs(s - 1.0) <= tol;
    }
    if (!converged && std::abs(s - 1.0) > 1e-9) throw std::runtime_error("normalizer not found");

    std::vector<double> w(k);
    for (size_t i = 0; i < k; ++i) {
        double z = eta * (d[i] + u);
        w[i] = 4.0 / (z * z);
    }
    return w;
}

TsallisInf::TsallisInf(int arm_count) : arm_count_(arm_count) {
    if (arm_count < 1) throw std::invalid_argument("arm count must be positive");
    cum_loss_est_.assign(static_cast<size_t>(arm_count), 0.0);
}

double TsallisInf::learning_rate() const {
    return 2.0 / std::sqrt(static_cast<double>(rounds_played_) + 1.0);
}

std::vector<double> TsallisInf::arm_distribution() const {
    return tsallis_weights(cum_loss_est_, learning_rate());
}

int TsallisInf::sample_arm(Rng& rng) {
    last_weights_ = arm_distribution();
    pending_sample_ = true;
    const double r = rng.next_double();
    double acc = 0.0;
    for (int i = 0; i + 1 < arm_count_; ++i) {
        acc += last_weights_[static_cast<size_t>(i)];
        if (r < acc) return i;
    }
    return arm_count_ - 1;
}

void TsallisInf::update(const ArmOutcome& outcome) {
    if (!pending_sample_) throw std::logic_error("no cached weights");
    if (outcome.arm < 0 || outcome.arm >= arm_count_) throw std::invalid_argument("arm index out of range");
    if (!(outcome.loss >= 0.0 && outcome.loss <= 1.0)) throw std::invalid_argument("loss outside [0,1]");
    cum_loss_est_[static_cast<size_t>(outcome.arm)] += outcome.loss / last_weights_[static_cast<size_t>(outcome.arm)];
    ++rounds_played_;
    pending_sample_ = false;
}

TsallisInf::Record TsallisInf::to_record() const {
    return Record{arm_count_, cum_loss_est_, rounds_played_};
}

TsallisInf TsallisInf::from_record(const Record& rec) {
    TsallisInf s(rec.arm_count);
    if (static_cast<int>(rec.cum_loss_est.size()) != rec.arm_count)
        throw config_error("checkpoint record has wrong estimate count");
    for (double v : rec.cum_loss_est)
        if (!(v >= 0.0) || !std::isfinite(v)) throw config_error("checkpoint estimate not finite nonnegative");
    if (rec.rounds_played < 0) throw config_error("checkpoint round counter negative");
    s.cum_loss_est_ = rec.cum_loss_est;
    s.rounds_played_ = rec.rounds_played;
    return s;
}

}  // namespace graphband
