#ifndef MSDE_PMF_HPP
#define MSDE_PMF_HPP

#include <numeric>
#include <stdexcept>
#include <vector>

#include "msde/quant.hpp"

namespace msde {

/// Probability mass function over the 2^b - 1 quantization levels, indexed by
/// level index (0 = most negative, M = zero, 2M = most positive).
struct LevelPmf {
    QuantGrid grid;
    std::vector<double> mass;

    explicit LevelPmf(const QuantGrid& g) : grid(g), mass(g.num_levels(), 0.0) {}

    LevelPmf(const QuantGrid& g, std::vector<double> m) : grid(g), mass(std::move(m)) {
        if (static_cast<int>(mass.size()) != g.num_levels())
            throw std::invalid_argument("LevelPmf: mass size does not match grid");
    }

    static LevelPmf point_mass(const QuantGrid& g, int level_idx) {
        if (level_idx < 0 || level_idx > 2 * g.max_mag)
            throw std::invalid_argument("LevelPmf::point_mass: index out of range");
        LevelPmf p(g);
        p.mass[level_idx] = 1.0;
        return p;
    }

    double sum() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

    bool is_normalized(double tol = 1e-10) const {
        double s = sum();
        return s > 1.0 - tol && s < 1.0 + tol;
    }

    void normalize() {
        double s = sum();
        if (!(s > 0.0))
            throw std::domain_error("LevelPmf::normalize: total mass is not positive");
        for (double& v : mass) v /= s;
    }

    double operator()(int level_idx) const { return mass[level_idx]; }
};

/// Reverses the level axis: mirror(p)(m) = p(-m).
inline LevelPmf mirror(const LevelPmf& p) {
    LevelPmf out(p.grid);
    int n = p.grid.num_levels();
    for (int i = 0; i < n; ++i) out.mass[i] = p.mass[n - 1 - i];
    return out;
}

}  // namespace msde

#endif
