#include <cstdlib>
#include <stdexcept>
#include <string>

#include "smid/kernels.hpp"

namespace smid::kernels {

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> isas{Isa::scalar};
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) isas.push_back(Isa::avx2);
#endif
#if defined(__aarch64__)
    isas.push_back(Isa::neon);
#endif
    return isas;
}

const KernelTable& table(Isa isa) {
    for (Isa have : available_isas()) {
        if (have != isa) continue;
        switch (isa) {
            case Isa::scalar: return scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
            case Isa::avx2: return avx2_table();
#endif
#if defined(__aarch64__)
            case Isa::neon: return neon_table();
#endif
            default: break;
        }
    }
    throw std::invalid_argument("kernel ISA '" + std::string(to_string(isa)) +
                                "' is not available on this machine");
}

namespace {

const KernelTable& select() {
    const auto isas = available_isas();
    if (const char* env = std::getenv("SMID_SIMD"); env != nullptr && *env != '\0') {
        const std::string_view want{env};
        if (want != "auto") {
            for (Isa isa : isas)
                if (to_string(isa) == want) return table(isa);
            throw std::invalid_argument("SMID_SIMD=" + std::string(want) +
                                        " does not name an available instruction set");
        }
    }
    return table(isas.back());
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& chosen = select();
    return chosen;
}

}  // namespace smid::kernels
