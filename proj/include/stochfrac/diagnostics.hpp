#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stochfrac/grid.hpp"

namespace stochfrac {

// Per-snapshot scalar monitors of one Monte Carlo path.
struct SnapshotDiagnostics {
    double t = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double bv = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double mass = 0.0;
};

struct PathDiagnostics {
    std::uint64_t path_id = 0;
    std::vector<SnapshotDiagnostics> snapshots;

    // Worst excursion beyond the admissible range [0, M] over all snapshots.
    double overshoot(double m_bound) const;
};

PathDiagnostics collect(std::uint64_t path_id,
                        std::span<const std::pair<double, LatticeFunction>> snapshots);

struct FieldStats {
    double mean = 0.0;
    double se = 0.0;  // sample std / sqrt(n); 0 when n < 2
};

// Cross-path sample means and standard errors, per snapshot.
struct EnsembleStats {
    int n_paths = 0;
    std::vector<double> times;
    std::vector<FieldStats> l1, l2, bv, min_u, max_u, mass;
};

EnsembleStats aggregate(std::span<const PathDiagnostics> paths);

enum class CheckStatus { pass, warn, fail };

struct AprioriCheck {
    std::string name;
    double t = 0.0;
    double value = 0.0;
    double bound = 0.0;
    CheckStatus status = CheckStatus::pass;
};

struct AprioriReport {
    std::vector<AprioriCheck> checks;
    double worst_overshoot = 0.0;
    bool has_fail() const;
    bool has_warn() const;
};

// Statistical form of the a priori estimates: per snapshot,
//   mean L1      <= u0_l1 + 3 SE,
//   mean BV      <= C u0_bv + 3 SE  (C = 1; on failure retested at C = 1.1,
//                                    which downgrades the verdict to WARN),
// plus the worst max-principle overshoot beyond [0, m_bound] (report-only).
AprioriReport check_apriori(const EnsembleStats& stats, double u0_l1, double u0_bv,
                            double m_bound);

std::string to_string(CheckStatus status);

}  // namespace stochfrac
