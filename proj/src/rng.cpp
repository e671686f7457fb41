#include "caaoi/rng.hpp"

namespace caaoi {

std::uint64_t derive_key(std::uint64_t master_seed, StreamTag tag, std::uint64_t a,
                         std::uint64_t b) {
    std::uint64_t k = mix64(master_seed ^ 0x6A09E667F3BCC909ULL);
    k = mix64(k + static_cast<std::uint64_t>(tag) * RngStream::kGamma);
    k = mix64(k + (a + 1) * 0xD1B54A32D192ED03ULL);
    k = mix64(k + (b + 1) * 0x8CB92BA72F3D8DD7ULL);
    return k;
}

} // namespace caaoi
