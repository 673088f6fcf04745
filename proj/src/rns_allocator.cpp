#include "osar/rns_allocator.hpp"

#include <algorithm>
#include <cmath>

#include "osar/common.hpp"
#include "osar/rates.hpp"

namespace osar {

std::vector<double> DeficitGreedyAllocator::target(const PointAllocatorState& s) {
    const std::size_t k = s.means.size();
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(s.means.begin(), s.means.end()) - s.means.begin());
    try {
        return optimal_point_rate(s.means, s.stds, best).alpha;
    } catch (const DegenerateError&) {
        return std::vector<double>(k, 1.0 / static_cast<double>(k));
    }
}

std::vector<std::size_t> DeficitGreedyAllocator::allocate_batch(const PointAllocatorState& s,
                                                                std::size_t batch) const {
    const std::size_t k = s.counts.size();
    if (s.means.size() != k || s.stds.size() != k || k == 0)
        throw InputError("allocate_batch: inconsistent arm state");
    std::vector<std::size_t> out(k, 0);
    if (batch == 0) return out;
    const std::vector<double> tgt = k == 1 ? std::vector<double>{1.0} : target(s);
    std::vector<std::size_t> n = s.counts;
    std::size_t total = 0;
    for (std::size_t c : n) total += c;
    for (std::size_t r = 0; r < batch; ++r) {
        const double floor = total > 1 ? std::log(static_cast<double>(total)) : 0.0;
        std::size_t pick = k;
        // Starved arms first, lowest count then lowest index.
        for (std::size_t i = 0; i < k; ++i)
            if (static_cast<double>(n[i]) < floor && (pick == k || n[i] < n[pick])) pick = i;
        if (pick == k) {
            double worst = -1e300;
            const double tot = static_cast<double>(std::max<std::size_t>(total, 1));
            for (std::size_t i = 0; i < k; ++i) {
                const double deficit = tgt[i] - static_cast<double>(n[i]) / tot;
                if (deficit > worst) {
                    worst = deficit;
                    pick = i;
                }
            }
        }
        ++n[pick];
        ++out[pick];
        ++total;
    }
    return out;
}

std::vector<std::size_t> EqualAllocator::allocate_batch(const PointAllocatorState& s,
                                                        std::size_t batch) const {
    const std::size_t k = s.counts.size();
    std::vector<std::size_t> n = s.counts, out(k, 0);
    for (std::size_t r = 0; r < batch; ++r) {
        const std::size_t i = static_cast<std::size_t>(std::min_element(n.begin(), n.end()) - n.begin());
        ++n[i];
        ++out[i];
    }
    return out;
}

std::unique_ptr<RnsAllocator> make_allocator(const std::string& name) {
    if (name == "deficit_greedy") return std::make_unique<DeficitGreedyAllocator>();
    if (name == "equal") return std::make_unique<EqualAllocator>();
    throw ConfigError("unknown R&S subroutine: " + name);
}

}  // namespace osar
