#include "resconcat/rng.hpp"

#include <bit>
#include <cmath>

namespace resconcat {

namespace {
constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    state += golden;
    return mix64(state);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept
{
    return mix64(parent + golden * (stream + 1));
}

std::uint64_t stable_hash(std::initializer_list<std::string_view> fields) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::string_view field : fields) {
        for (unsigned char c : field) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        // field separator so ("ab","c") != ("a","bc")
        h ^= 0x1f;
        h *= 0x100000001b3ULL;
    }
    return mix64(h);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept
{
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept
{
    const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
}

double Xoshiro256::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = uniform(-1.0, 1.0);
        v = uniform(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

}  // namespace resconcat
