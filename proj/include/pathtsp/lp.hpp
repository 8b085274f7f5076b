#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pathtsp/rational.hpp"

namespace pathtsp {

enum class Rel { Le, Eq, Ge };
enum class Sense { Min, Max };

/// LP over variables x_j >= 0 with exact rational data.
struct LpModel {
    struct Row {
        std::vector<std::pair<int, Rat>> coeffs;  // (variable, coefficient)
        Rel rel = Rel::Le;
        Rat rhs;
    };
    int var_count = 0;
    std::vector<Row> rows;
    std::vector<std::pair<int, Rat>> objective;
    Sense sense = Sense::Min;

    int add_var() { return var_count++; }
    void add_row(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rat> values;  // per variable, only meaningful when Optimal
    Rat objective;
};

/// Two-phase dense primal simplex under Bland's rule: exact, deterministic,
/// and terminating. Optimal outcomes are vertex solutions.
LpOutcome solve_lp(const LpModel& model);

struct RowViolation {
    int row;
    Rat slack;  // lhs-rhs signed toward feasibility; negative means violated
};

/// Every violated constraint, exactly; empty iff the point is feasible
/// (variable bounds x >= 0 are reported as pseudo-rows with row = -1-var).
std::vector<RowViolation> check_feasible_point(const LpModel& model,
                                               const std::vector<Rat>& point);

}  // namespace pathtsp
