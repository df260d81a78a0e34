#include "randbc/randomize.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace randbc {

RandomizationPlan RandomizationPlan::identity(std::size_t n) {
    RandomizationPlan plan;
    plan.n = n;
    for (std::size_t i = 0; i < 3; ++i) {
        plan.signs[i].assign(n, 1);
        plan.perms[i].resize(n);
        std::iota(plan.perms[i].begin(), plan.perms[i].end(), std::size_t{0});
    }
    return plan;
}

void RandomizationPlan::validate() const {
    for (std::size_t i = 0; i < 3; ++i) {
        if (signs[i].size() != n || perms[i].size() != n) throw std::invalid_argument("plan vectors must have length n");
        for (int s : signs[i])
            if (s != 1 && s != -1) throw std::invalid_argument("plan signs must be +1 or -1");
        std::vector<bool> seen(n, false);
        for (std::size_t p : perms[i]) {
            if (p >= n || seen[p]) throw std::invalid_argument("plan permutation is not a bijection");
            seen[p] = true;
        }
    }
}

bool RandomizationPlan::is_identity() const { return *this == identity(n); }

RandomizationPlan draw_plan(std::size_t n, Philox4x32& rng) {
    if (n == 0) throw std::invalid_argument("plan grid size must be positive");
    RandomizationPlan plan;
    plan.n = n;
    for (auto& s : plan.signs) {
        s.resize(n);
        for (auto& x : s) x = rng.coin() ? -1 : 1;
    }
    for (auto& p : plan.perms) {
        p.resize(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        for (std::size_t j = n; j > 1; --j) std::swap(p[j - 1], p[rng.uniform_index(j)]);
    }
    return plan;
}

RecursivePlan draw_recursive_plan(std::size_t n, std::size_t depth, std::uint64_t seed, std::uint64_t trial) {
    RecursivePlan rplan;
    rplan.levels.reserve(depth);
    for (std::size_t q = 1; q <= depth; ++q) {
        Philox4x32 rng = substream(seed, trial, static_cast<std::uint32_t>(q), StreamRole::plan);
        rplan.levels.push_back(draw_plan(n, rng));
    }
    return rplan;
}

Variant parse_variant(std::string_view text) {
    if (text == "full") return Variant::full;
    if (text == "sign" || text == "sign_only") return Variant::sign_only;
    if (text == "perm" || text == "perm_only") return Variant::perm_only;
    if (text == "none") return Variant::none;
    throw std::invalid_argument("unknown variant '" + std::string(text) + "' (expected full, sign, perm or none)");
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::full:
            return "full";
        case Variant::sign_only:
            return "sign";
        case Variant::perm_only:
            return "perm";
        case Variant::none:
            return "none";
    }
    return "?";
}

RandomizationPlan variant_plan(const RandomizationPlan& plan, Variant variant) {
    const RandomizationPlan id = RandomizationPlan::identity(plan.n);
    RandomizationPlan out = plan;
    switch (variant) {
        case Variant::full:
            break;
        case Variant::sign_only:
            out.perms = id.perms;
            break;
        case Variant::perm_only:
            out.signs = id.signs;
            break;
        case Variant::none:
            out = id;
            break;
    }
    return out;
}

RecursivePlan variant_plan(const RecursivePlan& plan, Variant variant) {
    RecursivePlan out;
    out.levels.reserve(plan.levels.size());
    for (const auto& level : plan.levels) out.levels.push_back(variant_plan(level, variant));
    return out;
}

Matrix<double> orthogonal_factor(const RandomizationPlan& plan, std::size_t which, std::size_t block) {
    if (which > 2) throw std::invalid_argument("factor index must be 0, 1 or 2");
    const std::size_t size = plan.n * block;
    Matrix<double> m(size, size, 0.0);
    for (std::size_t j = 0; j < plan.n; ++j) {
        const std::size_t target = plan.perms[which][j];
        for (std::size_t e = 0; e < block; ++e)
            m(target * block + e, j * block + e) = static_cast<double>(plan.signs[which][j]);
    }
    return m;
}

std::uint64_t plan_count(std::size_t n) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t per_factor = 1;  // 2^n * n!
    for (std::size_t j = 1; j <= n; ++j) {
        if (per_factor > kMax / (2 * j)) return kMax;
        per_factor *= 2 * j;
    }
    std::uint64_t total = 1;
    for (int i = 0; i < 3; ++i) {
        if (total > kMax / per_factor) return kMax;
        total *= per_factor;
    }
    return total;
}

double kappa_factor(const BilinearFormula& f) {
    const double k = kappa(f);
    if (k == 1.0) throw std::domain_error("kappa == 1: the rescaling factor is undefined");
    return 1.0 / (1.0 - k);
}

}  // namespace randbc
