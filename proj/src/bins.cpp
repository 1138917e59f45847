#include <riskbound/bins.hpp>
#include <riskbound/errors.hpp>

#include <algorithm>
#include <cmath>

namespace riskbound {

BinGrid::BinGrid(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2) throw InvalidArgument("bin grid needs at least two edges");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (!std::isfinite(edges_[i])) throw InvalidArgument("bin edges must be finite");
        if (i > 0 && !(edges_[i] > edges_[i - 1])) throw InvalidArgument("bin edges must be strictly increasing");
    }
}

BinGrid BinGrid::uniform(double lo, double hi, int bins) {
    if (bins < 1) throw InvalidArgument("need at least one bin");
    if (!(hi > lo)) throw InvalidArgument("bin range must be non-empty");
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
    e.back() = hi;
    return BinGrid(std::move(e));
}

int BinGrid::bin_of(double l) const {
    // first edge >= l
    auto it = std::lower_bound(edges_.begin(), edges_.end(), l);
    return static_cast<int>(it - edges_.begin());
}

BinnedEnvelope::BinnedEnvelope(BinGrid grid, std::vector<double> edge_values)
    : grid_(std::move(grid)), values_(std::move(edge_values)) {
    if (values_.size() != grid_.edges().size()) throw InvalidArgument("one value per bin edge expected");
    running_max_.resize(values_.size());
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) throw InvalidArgument("edge values must be finite");
        m = std::max(m, values_[i]);
        running_max_[i] = m;
    }
}

double BinnedEnvelope::h_plus(double l) const {
    const auto& e = grid_.edges();
    if (l < e.front()) return 0.0;
    if (l > e.back()) return running_max_.back();
    return running_max_[static_cast<std::size_t>(grid_.bin_of(l))];
}

double BinnedEnvelope::h_minus(double l) const {
    const auto& e = grid_.edges();
    if (l <= e.front()) return 0.0;
    if (l > e.back()) return values_.back();
    return values_[static_cast<std::size_t>(grid_.bin_of(l)) - 1];
}

PointwiseEnvelope BinnedEnvelope::upper_envelope() const {
    const auto& e = grid_.edges();
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) pts.emplace_back(e[i], running_max_[i + 1]);
    pts.emplace_back(e.back(), running_max_.back());
    return PointwiseEnvelope(std::move(pts));
}

} // namespace riskbound
