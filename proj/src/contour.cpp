#include "logcalc/contour.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace logcalc {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void validate_contour(const Contour& c) {
    if (!(c.radius > 0.0) || !std::isfinite(c.radius)) {
        throw std::invalid_argument("contour: radius must be positive and finite");
    }
    if (c.node_count < 16 || !is_power_of_two(c.node_count)) {
        throw std::invalid_argument("contour: node_count must be a power of two >= 16");
    }
    if (c.node_count > kDunfordMaxNodes) {
        throw std::invalid_argument("contour: node_count exceeds the 4096-node cap");
    }
}

// Fixed-order pairwise accumulation (binary counter over summation levels),
// so results do not depend on how node evaluations are scheduled.
class PairwiseSum {
public:
    void add(CMatrix term) {
        std::size_t level = 0;
        while (level < slots_.size() && slots_[level]) {
            term += *slots_[level];
            slots_[level].reset();
            ++level;
        }
        if (level == slots_.size()) slots_.emplace_back();
        slots_[level] = std::move(term);
    }

    CMatrix total(Eigen::Index n) const {
        CMatrix acc = CMatrix::Zero(n, n);
        for (const auto& s : slots_) {
            if (s) acc += *s;
        }
        return acc;
    }

private:
    std::vector<std::optional<CMatrix>> slots_;
};

struct QuadraturePass {
    CMatrix value;
    double max_abs_f = 0.0;
    double max_resolvent_norm = 0.0;
};

QuadraturePass trapezoid_pass(const DunfordFunction& f, const CMatrix& m,
                              const Contour& c, int nodes) {
    PairwiseSum acc;
    QuadraturePass out;
    for (int j = 0; j < nodes; ++j) {
        const double theta = 2.0 * M_PI * static_cast<double>(j) / nodes;
        const Complex unit = std::polar(1.0, theta);
        const Complex lambda = c.center + c.radius * unit;
        const Complex fval = f(lambda);
        const CMatrix res = resolvent(m, lambda);
        out.max_abs_f = std::max(out.max_abs_f, std::abs(fval));
        out.max_resolvent_norm = std::max(out.max_resolvent_norm, res.norm());
        // (1/2pi i) * f(lambda) R(lambda) dlambda with dlambda = i r e^(i theta) dtheta
        acc.add(((c.radius / nodes) * unit * fval) * res);
    }
    out.value = acc.total(m.rows());
    return out;
}

} // namespace

Complex DunfordFunction::operator()(Complex lambda) const {
    switch (kind) {
        case Kind::constant_one:
            return Complex(1.0, 0.0);
        case Kind::principal_log:
            return scalar_principal_log(lambda);
        case Kind::exponential:
            return std::exp(lambda);
        case Kind::poly_times_exp: {
            Complex p(1.0, 0.0);
            for (int k = 0; k < degree; ++k) p *= lambda;
            return p * std::exp(lambda);
        }
    }
    throw std::logic_error("unreachable integrand kind");
}

Complex scalar_principal_log(Complex z) {
    if (z == Complex(0.0, 0.0)) throw ZeroArgument("principal log of zero");
    // Collapse -0.0 to +0.0 so the negative real axis lands on arg = +pi.
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    return {std::log(std::abs(z)), std::atan2(im, z.real())};
}

Contour build_contour(Complex kappa, double growth_bound) {
    if (!(growth_bound >= 0.0) || !std::isfinite(growth_bound)) {
        throw std::invalid_argument("build_contour: growth bound must be nonnegative and finite");
    }
    const double ak = std::abs(kappa);
    if (ak <= growth_bound) {
        throw ShiftTooSmall("|kappa| = " + std::to_string(ak) +
                            " must exceed the growth bound " + std::to_string(growth_bound));
    }
    return {kappa, (growth_bound + ak) / 2.0, 16};
}

DunfordResult dunford_apply(const DunfordFunction& f, const CMatrix& m,
                            const Contour& c, double tol) {
    require_square_finite(m, "dunford_apply");
    validate_contour(c);
    if (!(tol > 0.0)) throw std::invalid_argument("dunford_apply: tol must be positive");
    if (f.kind == DunfordFunction::Kind::principal_log &&
        distance_to_log_cut(c.center) <= c.radius) {
        throw BranchCutViolation("contour disk intersects the branch cut (-inf, 0]");
    }

    int nodes = c.node_count;
    QuadraturePass prev = trapezoid_pass(f, m, c, nodes);
    for (;;) {
        const int next_nodes = 2 * nodes;
        if (next_nodes > kDunfordMaxNodes) {
            throw NoConvergence("dunford_apply: no convergence within " +
                                std::to_string(kDunfordMaxNodes) + " nodes");
        }
        QuadraturePass cur = trapezoid_pass(f, m, c, next_nodes);
        const double gap = operator_norm(cur.value - prev.value);
        if (gap <= tol) {
            DunfordResult out;
            out.value = std::move(cur.value);
            out.node_count_used = next_nodes;
            out.richardson_gap = gap;
            out.norm_bound = c.radius * cur.max_abs_f * cur.max_resolvent_norm;
            return out;
        }
        if (next_nodes == kDunfordMaxNodes) {
            throw NoConvergence("dunford_apply: Richardson gap " + std::to_string(gap) +
                                " above tol with " + std::to_string(next_nodes) + " nodes");
        }
        prev = std::move(cur);
        nodes = next_nodes;
    }
}

Complex winding_integral(const Contour& c, int node_count) {
    validate_contour(c);
    if (node_count < 2) throw std::invalid_argument("winding_integral: need at least 2 nodes");
    Complex acc(0.0, 0.0);
    for (int j = 0; j < node_count; ++j) {
        const double theta = 2.0 * M_PI * static_cast<double>(j) / node_count;
        const Complex unit = std::polar(1.0, theta);
        const Complex lambda = c.center + c.radius * unit;
        if (lambda == Complex(0.0, 0.0)) throw ZeroArgument("winding_integral: node at the origin");
        acc += unit / lambda;
    }
    return acc * (c.radius / node_count);
}

nlohmann::json contour_to_json(const Contour& c) {
    return {{"center", {c.center.real(), c.center.imag()}},
            {"radius", c.radius},
            {"nodes", c.node_count}};
}

} // namespace logcalc
