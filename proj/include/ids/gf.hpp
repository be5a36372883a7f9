#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ids::gf {

// GF(2^k) with log/antilog tables. Elements are integers in [0, q); addition
// is bitwise XOR.
class Field {
public:
    Field(int k, std::uint32_t primitive_poly);

    int k() const { return k_; }
    int q() const { return q_; }
    std::uint32_t poly() const { return poly_; }

    static int add(int a, int b) { return a ^ b; }

    int mul(int a, int b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[log_[a] + log_[b]];
    }

    int inv(int a) const {
        if (a == 0) throw std::domain_error("gf: inverse of zero");
        return exp_[(q_ - 1) - log_[a]];
    }

    int div(int a, int b) const { return mul(a, inv(b)); }

    int pow(int a, int e) const;

    int log(int a) const {
        if (a == 0) throw std::domain_error("gf: log of zero");
        return log_[a];
    }
    int antilog(int e) const { return exp_[e % (q_ - 1)]; }

    // cached field with the default primitive polynomial for k in [1, 8]
    static const Field& of(int k);
    static std::uint32_t default_poly(int k);

private:
    int k_;
    int q_;
    std::uint32_t poly_;
    std::vector<std::uint16_t> log_;
    std::vector<std::uint16_t> exp_;  // length 2(q-1), doubled to skip a mod
};

// Degree of the polynomial bitmask (index of highest set bit), -1 for zero.
int poly_degree(std::uint32_t p);

// Irreducibility over GF(2) by exhaustive trial division (k <= 8 regime).
bool is_irreducible(std::uint32_t poly);

}  // namespace ids::gf
