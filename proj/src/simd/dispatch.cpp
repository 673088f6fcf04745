#include <atomic>
#include <cstdlib>
#include <string>

#include "osar/simd.hpp"

namespace osar::simd {
namespace {

const KernelTable* pick_default() {
    // OSAR_SIMD=scalar pins the reference kernels, e.g. for bisecting a numeric difference.
    if (const char* env = std::getenv("OSAR_SIMD"); env && std::string(env) == "scalar")
        return &scalar_table();
    if (const KernelTable* t = avx2_table()) return t;
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> table{pick_default()};
    return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

bool force(Isa isa) {
    const KernelTable* t = isa == Isa::Scalar ? &scalar_table() : avx2_table();
    if (!t) return false;
    slot().store(t, std::memory_order_relaxed);
    return true;
}

std::string_view name(Isa isa) { return isa == Isa::Scalar ? "scalar" : "avx2"; }

}  // namespace osar::simd
