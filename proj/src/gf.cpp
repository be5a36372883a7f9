#include "ids/gf.hpp"

#include <array>
#include <memory>

namespace ids::gf {

int poly_degree(std::uint32_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

namespace {

// carry-less multiply then reduce mod poly
std::uint32_t polymul_mod(std::uint32_t a, std::uint32_t b, std::uint32_t poly) {
    std::uint32_t r = 0;
    while (b) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
    }
    const int pd = poly_degree(poly);
    for (int d = poly_degree(r); d >= pd; d = poly_degree(r)) {
        r ^= poly << (d - pd);
    }
    return r;
}

}  // namespace

bool is_irreducible(std::uint32_t poly) {
    const int d = poly_degree(poly);
    if (d <= 0) return false;
    if ((poly & 1u) == 0) return false;  // x divides
    for (std::uint32_t f = 2; poly_degree(f) <= d / 2; ++f) {
        // trial division: check whether f divides poly
        std::uint32_t rem = poly;
        const int fd = poly_degree(f);
        for (int rd = poly_degree(rem); rd >= fd; rd = poly_degree(rem)) {
            rem ^= f << (rd - fd);
        }
        if (rem == 0) return false;
    }
    return true;
}

Field::Field(int k, std::uint32_t primitive_poly) : k_(k), q_(1 << k), poly_(primitive_poly) {
    if (k < 1 || k > 8) throw std::invalid_argument("gf: k must be in [1, 8]");
    if (poly_degree(primitive_poly) != k) throw std::invalid_argument("gf: polynomial degree != k");
    if (!is_irreducible(primitive_poly)) throw std::invalid_argument("gf: polynomial not irreducible");

    log_.assign(q_, 0);
    exp_.assign(2 * (q_ - 1), 0);
    std::uint32_t x = 1;
    for (int i = 0; i < q_ - 1; ++i) {
        if (i > 0 && x == 1) throw std::invalid_argument("gf: polynomial not primitive");
        exp_[i] = static_cast<std::uint16_t>(x);
        exp_[i + q_ - 1] = exp_[i];
        log_[x] = static_cast<std::uint16_t>(i);
        x = polymul_mod(x, 2, primitive_poly);
    }
    if (x != 1) throw std::invalid_argument("gf: polynomial not primitive");
}

int Field::pow(int a, int e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    const int l = (log_[a] * static_cast<long long>(e)) % (q_ - 1);
    return exp_[l];
}

std::uint32_t Field::default_poly(int k) {
    // conventional primitive polynomials; k=4 is x^4+x+1
    static constexpr std::array<std::uint32_t, 9> polys = {0,    0x3,  0x7,  0xB, 0x13,
                                                           0x25, 0x43, 0x89, 0x11D};
    if (k < 1 || k > 8) throw std::invalid_argument("gf: k must be in [1, 8]");
    return polys[static_cast<std::size_t>(k)];
}

const Field& Field::of(int k) {
    static std::array<std::unique_ptr<Field>, 9> cache;
    if (k < 1 || k > 8) throw std::invalid_argument("gf: k must be in [1, 8]");
    if (!cache[static_cast<std::size_t>(k)]) {
        cache[static_cast<std::size_t>(k)] = std::make_unique<Field>(k, default_poly(k));
    }
    return *cache[static_cast<std::size_t>(k)];
}

}  // namespace ids::gf
