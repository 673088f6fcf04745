#pragma once
// Splits the simulation replications assigned to one parameter point among the
// k solutions.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace osar {

struct PointAllocatorState {
    std::vector<std::size_t> counts;
    std::vector<double> means;
    std::vector<double> stds;
};

class RnsAllocator {
public:
    virtual ~RnsAllocator() = default;
    virtual std::string name() const = 0;
    // Per-arm counts summing to `batch`.
    virtual std::vector<std::size_t> allocate_batch(const PointAllocatorState& state,
                                                    std::size_t batch) const = 0;
};

// Tracks the optimal static fractions computed on plug-in means and stds: each
// replication goes to the arm furthest below its target share, except that arms
// with fewer than log(total) replications are served first.
class DeficitGreedyAllocator final : public RnsAllocator {
public:
    std::string name() const override { return "deficit_greedy"; }
    std::vector<std::size_t> allocate_batch(const PointAllocatorState& state,
                                            std::size_t batch) const override;
    // Target shares used for a batch: optimal static fractions, or uniform when
    // the plug-in best is tied.
    static std::vector<double> target(const PointAllocatorState& state);
};

// Round-robin by lowest count; a rate-agnostic baseline.
class EqualAllocator final : public RnsAllocator {
public:
    std::string name() const override { return "equal"; }
    std::vector<std::size_t> allocate_batch(const PointAllocatorState& state,
                                            std::size_t batch) const override;
};

std::unique_ptr<RnsAllocator> make_allocator(const std::string& name);

}  // namespace osar
