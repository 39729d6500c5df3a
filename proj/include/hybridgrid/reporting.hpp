#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hybridgrid/experiment.hpp"
#include "hybridgrid/pinit_oracle.hpp"

namespace hybridgrid {

/// Raised by emit_table when the stats do not cover a full grid.
class IncompleteGrid : public std::runtime_error {
public:
    explicit IncompleteGrid(std::vector<CellKey> missing);
    const std::vector<CellKey>& missing() const { return missing_; }

private:
    std::vector<CellKey> missing_;
};

/// Full-precision text for a double ("%.17g"; "nan"/"inf" for non-finite values).
std::string format_full(double x);

struct TableRow {
    int wall_distance = 0;
    Strategy strategy = Strategy::hybrid;
    int base_size = 0;
    double mean_n_act = 0.0;
    double std_error = 0.0;
    bool is_min = false;
    std::int64_t n_errors = 0;
};

/// Rows of the results table in output order, with the per-(d_wall, b)
/// minimum flagged. Throws IncompleteGrid.
std::vector<TableRow> make_table(const std::vector<SummaryStats>& stats);

/// Comma-separated table with columns
/// d_wall,strategy,b,mean_n_act,std_error,is_min,mean_display,std_error_display,n_errors
/// sorted by d_wall, strategy (hybrid, prob-classical, unrestricted), b.
std::string emit_table(const std::vector<SummaryStats>& stats);

/// Inverse of emit_table on the full-precision columns.
std::vector<TableRow> parse_table(const std::string& csv);

/// "bin,relative_frequency" rows; for unrestricted cells a bin labels [bin, 2 bin).
std::string emit_histogram(const std::vector<SummaryStats>& stats, const CellKey& cell);

/// Plot series of a success curve: L,p_init,error,method with '#' header lines.
/// `error` is the binomial standard deviation for Monte-Carlo points, 0 otherwise.
std::string emit_curve(const SuccessCurve& curve);

/// Plot series of a fixed-length sweep:
/// L,mean_n_act,std_error,expected_n_act,p_init,n_errors.
std::string emit_fixed_curve(const GridworldSpec& spec, Strategy strategy,
                             const std::vector<FixedLengthPoint>& points);

std::string emit_ratios(const std::vector<SavingsRatio>& ratios);

/// One row per RunRecord.
std::string emit_runs(const std::vector<RunRecord>& runs);

/// Structured summary mirroring SummaryStats, one object per cell.
std::string emit_summary_json(const std::vector<SummaryStats>& stats);
std::vector<SummaryStats> parse_summary_json(const std::string& text);

}  // namespace hybridgrid
