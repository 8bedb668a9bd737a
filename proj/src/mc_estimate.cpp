#include "treeperc/mc_estimate.hpp"

#include <algorithm>
#include <cmath>

#include "treeperc/errors.hpp"

namespace treeperc {

McEstimate make_estimate(std::uint64_t successes, std::uint64_t trials) {
    if (trials == 0) {
        throw DomainError("an estimate needs at least one trial");
    }
    if (successes > trials) {
        throw DomainError("successes exceed trials");
    }
    McEstimate e;
    e.trials = trials;
    e.successes = successes;
    const double n = static_cast<double>(trials);
    e.estimate = static_cast<double>(successes) / n;
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / n);

    constexpr double z = 1.959963984540054;
    const double z2 = z * z;
    const double centre = (e.estimate + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half =
        z * std::sqrt(e.estimate * (1.0 - e.estimate) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
    e.ci95 = {std::max(0.0, std::min(centre - half, e.estimate)),
              std::min(1.0, std::max(centre + half, e.estimate))};
    return e;
}

double combined_std_error(const McEstimate& a, const McEstimate& b) {
    return std::hypot(a.std_error, b.std_error);
}

MeanEstimate MomentAccumulator::finish() const {
    MeanEstimate m;
    m.samples = n;
    if (n == 0) {
        return m;
    }
    const double nn = static_cast<double>(n);
    m.mean = sum / nn;
    const double var = std::max(0.0, sum_sq / nn - m.mean * m.mean);
    m.std_error = n > 1 ? std::sqrt(var / (nn - 1.0)) : 0.0;
    return m;
}

}  // namespace treeperc
