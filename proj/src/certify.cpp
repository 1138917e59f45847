#include <riskbound/certify.hpp>
#include <riskbound/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskbound {

namespace {

constexpr std::uint64_t epsilon_tag = 2;
constexpr std::uint64_t tight_tag = 3;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

void check_params(const CertifyParams& p) {
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
    if (!(p.delta > 0.0 && p.delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
    if (!(p.v > 0.0)) throw InvalidArgument("v must be positive");
    if (!(p.eta > 0.0)) throw InvalidArgument("eta must be positive");
    if (p.bins < 1) throw InvalidArgument("need at least one bin");
    p.rollouts.validate();
}

CertifiedBound base_record(BoundKind kind, const CertifyParams& p, std::uint64_t n_used, std::uint64_t n_required,
                           std::size_t c, double B, double eps_hat) {
    CertifiedBound b;
    b.kind = kind;
    b.alpha = p.alpha;
    b.delta = p.delta;
    b.v = p.v;
    b.eta = p.eta;
    b.n_delta_used = n_used;
    b.n_delta_required = n_required;
    b.c_used = c;
    b.importance_bound = B;
    b.eps_hat = eps_hat;
    return b;
}

} // namespace

std::string to_string(BoundKind kind) {
    switch (kind) {
    case BoundKind::L1: return "L1";
    case BoundKind::L2: return "L2";
    case BoundKind::U: return "U";
    case BoundKind::TightLower: return "TightLower";
    }
    return "?";
}

double CertifiedBound::radius() const {
    double r = 0.0;
    for (const auto& [name, value] : radii) r += value;
    return r;
}

bool CertifiedBound::violated(double q) const {
    if (!applicable) return false;
    if (kind == BoundKind::U) return q - value > radius();
    return value - q > radius();
}

std::uint64_t required_n_delta_uniform(const ProposalQ0& q0, double v, double delta) {
    return n_delta_for_epsilon(v, delta / 2.0, q0.importance_bound(), q0.terms());
}

std::uint64_t required_n_delta_tight(const ProposalQ0& q0, double eta, double delta, int bins) {
    return n_delta_for_h(eta, delta / 4.0, q0.importance_bound(), q0.terms(), bins);
}

std::vector<CertifiedBound> certify_uniform(const SimplifiedPair& pair, std::span<const double> returns,
                                            const ProposalQ0& q0, const CertifyParams& params, int k,
                                            std::uint64_t n_delta, Rng& rng) {
    check_params(params);
    if (returns.empty()) throw InvalidArgument("need at least one rollout return");
    const double eps = q0.atoms().empty() ? 0.0 : estimate_epsilon(q0, n_delta, rng).epsilon;
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    auto q_hat = [&](double level) { return cvar_estimate_presorted(sorted, level); };

    const double a = params.alpha, d = params.delta, v = params.v;
    const double span = pair.return_span(k);
    const double C = static_cast<double>(sorted.size());
    const auto required = required_n_delta_uniform(q0, v, d);
    std::vector<CertifiedBound> out;

    if (eps + a < 1.0) {
        auto b = base_record(BoundKind::L1, params, n_delta, required, sorted.size(), q0.importance_bound(), eps);
        b.radii = {{"lambda_1", -(2.0 * span / a) * std::sqrt(std::log(1.0 / (d / 4.0)) / (2.0 * C))},
                   {"lambda_2", std::sqrt(eps) / a * 2.0 * span * std::sqrt(5.0 * std::log(3.0 / (d / 4.0)) / C)}};
        const double inner = eps - 4.0 * v;
        if (inner > 0.0 && inner < 1.0) {
            b.case_tag = "eps_hat+alpha<1";
            b.value = (a + eps - 4.0 * v) / a * q_hat(a + eps) - eps / a * q_hat(inner);
        } else {
            b.applicable = false;
            b.case_tag = "eps_hat-4v outside (0,1)";
            b.value = nan;
        }
        out.push_back(std::move(b));
    } else {
        auto b = base_record(BoundKind::L2, params, n_delta, required, sorted.size(), q0.importance_bound(), eps);
        b.case_tag = "eps_hat+alpha>=1";
        b.value = (sample_mean(sorted) - (eps + 4.0 * v) * q_hat(a) - (a + eps + 4.0 * v - 1.0) * span) / a;
        b.radii = {{"eta_1", std::sqrt(-std::log(d / 4.0) * span / (C * C * a * a))},
                   {"eta_2", 2.0 * std::sqrt(eps + 4.0 * v) / a * span * std::sqrt(5.0 * std::log(3.0 / (d / 4.0)) / C)}};
        out.push_back(std::move(b));
    }

    auto u = base_record(BoundKind::U, params, n_delta, required, sorted.size(), q0.importance_bound(), eps);
    if (a > eps) {
        u.case_tag = "alpha>eps_hat";
        u.value = (a - eps + 4.0 * v) / a * q_hat(a - eps) + eps / a * span;
        u.radii = {{"lambda", 2.0 * span * std::sqrt(a - eps) / a * std::sqrt(5.0 * std::log(3.0 / (d / 2.0)) / C)}};
    } else {
        u.applicable = false;
        u.case_tag = "alpha<=eps_hat";
        u.value = nan;
    }
    out.push_back(std::move(u));
    return out;
}

DiscreteDistribution build_f_hat(std::span<const double> returns, const PointwiseEnvelope& envelope, double eta,
                                 double k0, std::span<const double> extra_points) {
    if (returns.empty()) throw InvalidArgument("need at least one rollout return");
    if (!(eta >= 0.0)) throw InvalidArgument("eta must be non-negative");
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < k0) throw InvalidArgument("returns must not lie below k0");

    std::vector<double> points = {k0};
    points.insert(points.end(), sorted.begin(), sorted.end());
    points.insert(points.end(), extra_points.begin(), extra_points.end());
    for (const auto& [x, value] : envelope.breakpoints()) points.push_back(x);
    std::erase_if(points, [&](double x) { return x < k0; });
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> atoms;
    double prev = 0.0;
    for (double x : points) {
        const auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
        const double f = std::min(1.0, static_cast<double>(below) / n + envelope(x) + eta);
        if (f > prev) atoms.emplace_back(x, f - prev);
        prev = std::max(prev, f);
        if (prev >= 1.0) break;
    }
    return DiscreteDistribution(std::move(atoms));
}

TightLowerResult certify_tight_lower(const SimplifiedPair& pair, std::span<const double> returns,
                                     const ProposalQ0& q0, const CertifyParams& params, int k,
                                     std::uint64_t n_delta, Rng& rng) {
    check_params(params);
    if (n_delta == 0) throw InvalidArgument("the tight lower bound needs at least one draw");
    const double span = pair.return_span(k);
    BinGrid grid = BinGrid::uniform(-span, span, params.bins);
    std::vector<double> g_hat(grid.edges().size(), 0.0);
    if (!q0.atoms().empty()) g_hat = g_from_counts(q0, draw_delta_counts(q0, n_delta, rng), grid.edges());
    BinnedEnvelope binned(grid, g_hat);
    auto f_hat = build_f_hat(returns, binned.upper_envelope(), params.eta, -span, grid.edges());

    const auto counts = multinomial_counts(f_hat.probs(), n_delta, rng);
    auto b = base_record(BoundKind::TightLower, params, n_delta,
                         required_n_delta_tight(q0, params.eta, params.delta, params.bins), returns.size(),
                         q0.importance_bound(), nan);
    b.case_tag = "h_plus+eta";
    b.value = cvar_estimate_counts(f_hat.values(), counts, params.alpha);
    b.radii = {{"v", 2.0 * span / params.alpha *
                         std::sqrt(std::log(1.0 / (params.delta / 4.0)) / (2.0 * static_cast<double>(n_delta)))}};
    return {std::move(b), std::move(f_hat), std::move(g_hat), std::move(grid)};
}

CertificationResult run_certification(const SimplifiedPair& pair, const Policy& policy, const TreeQuery& query,
                                      const CertifyParams& params, std::size_t budget) {
    check_params(params);
    CertificationResult res;
    const auto q0 = build_default_proposal(pair, policy, query, {}, 0.5, budget);
    res.importance_bound = q0.importance_bound();
    res.terms = q0.terms();
    res.proposal_atoms = q0.atoms().size();
    const auto req_u = required_n_delta_uniform(q0, params.v, params.delta);
    const auto req_t = required_n_delta_tight(q0, params.eta, params.delta, params.bins);
    if (params.n_delta) {
        if (*params.n_delta < req_u)
            throw InvalidArgument("N_delta " + std::to_string(*params.n_delta) +
                                  " is below the uniform-bound requirement " + std::to_string(req_u));
        if (*params.n_delta < req_t)
            throw InvalidArgument("N_delta " + std::to_string(*params.n_delta) +
                                  " is below the tight-lower-bound requirement " + std::to_string(req_t));
        res.n_delta_uniform = res.n_delta_tight = *params.n_delta;
        res.n_delta_derived = false;
    } else {
        res.n_delta_uniform = req_u;
        res.n_delta_tight = std::max<std::uint64_t>(req_t, 1);
    }

    res.returns = simulate_returns(pair, policy, query, ModelKind::Simplified, params.rollouts, params.workers);
    Rng eps_rng = make_stream(params.rollouts.rng_seed, epsilon_tag, 0);
    res.bounds = certify_uniform(pair, res.returns, q0, params, query.k, res.n_delta_uniform, eps_rng);
    Rng tight_rng = make_stream(params.rollouts.rng_seed, tight_tag, 0);
    auto tight = certify_tight_lower(pair, res.returns, q0, params, query.k, res.n_delta_tight, tight_rng);
    tight.bound.eps_hat = res.bounds.front().eps_hat;
    res.bounds.push_back(std::move(tight.bound));
    res.f_hat = std::move(tight.f_hat);
    return res;
}

} // namespace riskbound
