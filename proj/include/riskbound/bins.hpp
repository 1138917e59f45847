#pragma once

#include <riskbound/bounds.hpp>

#include <span>
#include <vector>

namespace riskbound {

/// Bin edges k_0 < k_1 < ... < k_I; bin i is (k_{i-1}, k_i].
class BinGrid {
public:
    explicit BinGrid(std::vector<double> edges);
    /// I equal bins over [lo, hi].
    static BinGrid uniform(double lo, double hi, int bins);

    const std::vector<double>& edges() const { return edges_; }
    int bins() const { return static_cast<int>(edges_.size()) - 1; }
    /// Index i with l in (k_{i-1}, k_i]; 0 for l <= k_0 and bins()+1 for l > k_I.
    int bin_of(double l) const;
    /// True when [lo, hi] lies inside [k_0, k_I].
    bool spans(double lo, double hi) const { return edges_.front() <= lo && hi <= edges_.back(); }

private:
    std::vector<double> edges_;
};

/**
 * Step functions built from values on the bin edges. h_plus(l) = max_{j<=i} v_j and
 * h_minus(l) = v_{i-1} for l in (k_{i-1}, k_i]; at and below k_0 h_plus is v_0 at
 * k_0 and 0 before, h_minus is 0; above k_I both hold v_I.
 */
class BinnedEnvelope {
public:
    BinnedEnvelope(BinGrid grid, std::vector<double> edge_values);

    const BinGrid& grid() const { return grid_; }
    const std::vector<double>& edge_values() const { return values_; }
    /// Running maximum of the edge values.
    const std::vector<double>& monotone_values() const { return running_max_; }

    double h_plus(double l) const;
    double h_minus(double l) const;

    /**
     * Right-continuous non-decreasing envelope dominating h_plus everywhere on
     * [k_0, inf): on [k_{i-1}, k_i) it takes the running max up to k_i.
     */
    PointwiseEnvelope upper_envelope() const;

private:
    BinGrid grid_;
    std::vector<double> values_;
    std::vector<double> running_max_;
};

} // namespace riskbound
