#include "relaysim/random.hpp"

namespace relaysim {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

RandomStream RandomStream::derive(std::uint64_t master_seed,
                                  std::initializer_list<std::uint64_t> counters) {
    std::uint64_t key = mix64(master_seed);
    for (auto c : counters) {
        key = mix64(key ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return RandomStream(key);
}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

std::uint8_t RandomStream::bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

} // namespace relaysim
