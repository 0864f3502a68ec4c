#pragma once

// Escape-probability measurement model and its inversion.
//
// A measurement pulse with threshold k makes level n escape with probability
// σ((n - k)/w), σ the logistic function. w = 0 is the sharp rule n > k.

#include <span>
#include <string>
#include <vector>

namespace ladder {

struct MeasurePulse {
    double threshold{0.5};  // k, continuous level index
    double width{0.25};     // w in levels; 0 selects the sharp rule
    void validate() const;
};

// Escape probability of a single level.
double escape_weight(int n, const MeasurePulse& pulse);

double escape_probability(std::span<const double> populations, const MeasurePulse& pulse);

struct EscapeCurve {
    std::vector<double> thresholds;  // k values
    std::vector<double> escape;      // S(k)
};

// Thresholds k = -1/2, 1/2, ..., N - 1/2.
std::vector<double> integer_spaced_thresholds(int n_levels);

EscapeCurve escape_curve(std::span<const double> populations, std::span<const double> thresholds, double width);

struct ExtractOptions {
    int n_levels{0};          // 0: one level per threshold step
    double width{0.0};        // pulse width assumed by the inversion
    double noise_sigma{0.0};  // stated noise on S; violations beyond 3σ are flagged
};

struct Extraction {
    std::vector<double> populations;
    double residual{0.0};        // ||forward(P) - S||_2
    double max_violation{0.0};   // largest negative increment (sharp) or misfit (smooth)
    bool inconsistent{false};
    std::string diagnostic;
};

// Sharp width: telescoping differences of curves on integer-spaced thresholds.
// Otherwise non-negative least squares with Σ P ≤ 1.
Extraction extract_populations(const EscapeCurve& curve, const ExtractOptions& options);

// Σ_{n > n_c} P_n.
double locking_probability(std::span<const double> populations, int n_c);

// Cutoff used for threshold maps: ceil(n_res / 2).
int map_locking_cutoff(double n_res);

}  // namespace ladder
