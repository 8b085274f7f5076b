#include "pathtsp/lp.hpp"

#include <algorithm>

#include "pathtsp/errors.hpp"

namespace pathtsp {

void LpModel::add_row(std::vector<std::pair<int, Rat>> coeffs, Rel rel, Rat rhs) {
    for (auto& [var, coef] : coeffs) {
        (void)coef;
        if (var < 0 || var >= var_count)
            throw InternalError("LpModel row references undeclared variable");
    }
    rows.push_back(Row{std::move(coeffs), rel, std::move(rhs)});
}

namespace {

// Dense simplex tableau. Column layout: structural | slack/surplus | artificial.
// basis[i] is the column currently basic in row i.
struct Tableau {
    int rows = 0;
    int cols = 0;  // without the rhs column
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> rhs;
    std::vector<Rat> cost;  // current objective row (reduced costs)
    Rat cost_rhs;           // negative of current objective value
    std::vector<int> basis;

    void pivot(int prow, int pcol) {
        std::vector<Rat>& pr = a[prow];
        Rat inv = 1 / pr[pcol];
        if (inv != 1) {
            for (int j = 0; j < cols; ++j)
                if (pr[j] != 0) pr[j] *= inv;
            rhs[prow] *= inv;
        }
        for (int i = 0; i < rows; ++i) {
            if (i == prow) continue;
            Rat factor = a[i][pcol];
            if (factor == 0) continue;
            std::vector<Rat>& ri = a[i];
            for (int j = 0; j < cols; ++j)
                if (pr[j] != 0) ri[j] -= factor * pr[j];
            rhs[i] -= factor * rhs[prow];
        }
        Rat cf = cost[pcol];
        if (cf != 0) {
            for (int j = 0; j < cols; ++j)
                if (pr[j] != 0) cost[j] -= cf * pr[j];
            cost_rhs -= cf * rhs[prow];
        }
        basis[prow] = pcol;
    }

    // Bland: entering = lowest eligible column, leaving = lowest basic index
    // among the ratio-test minimizers. Returns false when optimal.
    // Throws on unboundedness via the out flag.
    bool step(bool& unbounded) {
        int enter = -1;
        for (int j = 0; j < cols; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter < 0) {
            unbounded = false;
            return false;
        }
        int leave = -1;
        Rat best;
        for (int i = 0; i < rows; ++i) {
            if (a[i][enter] <= 0) continue;
            Rat ratio = rhs[i] / a[i][enter];
            if (leave < 0 || ratio < best ||
                (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0) {
            unbounded = true;
            return false;
        }
        pivot(leave, enter);
        unbounded = false;
        return true;
    }
};

}  // namespace

LpOutcome solve_lp(const LpModel& model) {
    const int m = static_cast<int>(model.rows.size());
    const int n = model.var_count;

    // Normalize rows to nonnegative rhs, then slack out.
    std::vector<std::vector<Rat>> dense(m, std::vector<Rat>(n));
    std::vector<Rat> b(m);
    std::vector<Rel> rel(m);
    for (int i = 0; i < m; ++i) {
        for (const auto& [var, coef] : model.rows[i].coeffs) dense[i][var] += coef;
        b[i] = model.rows[i].rhs;
        rel[i] = model.rows[i].rel;
        if (b[i] < 0) {
            for (Rat& c : dense[i]) c = -c;
            b[i] = -b[i];
            if (rel[i] == Rel::Le)
                rel[i] = Rel::Ge;
            else if (rel[i] == Rel::Ge)
                rel[i] = Rel::Le;
        }
    }

    int slack_count = 0;
    for (int i = 0; i < m; ++i)
        if (rel[i] != Rel::Eq) ++slack_count;
    int art_count = 0;
    for (int i = 0; i < m; ++i)
        if (rel[i] != Rel::Le) ++art_count;

    Tableau tab;
    tab.rows = m;
    tab.cols = n + slack_count + art_count;
    tab.a.assign(m, std::vector<Rat>(tab.cols));
    tab.rhs = b;
    tab.basis.assign(m, -1);
    const int art_begin = n + slack_count;
    int next_slack = n, next_art = art_begin;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) tab.a[i][j] = dense[i][j];
        if (rel[i] == Rel::Le) {
            tab.a[i][next_slack] = 1;
            tab.basis[i] = next_slack++;
        } else if (rel[i] == Rel::Ge) {
            tab.a[i][next_slack++] = -1;
            tab.a[i][next_art] = 1;
            tab.basis[i] = next_art++;
        } else {
            tab.a[i][next_art] = 1;
            tab.basis[i] = next_art++;
        }
    }

    // Phase 1: minimize the sum of artificials.
    if (art_count > 0) {
        tab.cost.assign(tab.cols, Rat(0));
        tab.cost_rhs = 0;
        for (int j = art_begin; j < tab.cols; ++j) tab.cost[j] = 1;
        for (int i = 0; i < m; ++i)
            if (tab.basis[i] >= art_begin) {
                for (int j = 0; j < tab.cols; ++j) tab.cost[j] -= tab.a[i][j];
                tab.cost_rhs -= tab.rhs[i];
            }
        bool unbounded = false;
        while (tab.step(unbounded)) {
        }
        if (unbounded) throw InternalError("phase-1 LP cannot be unbounded");
        if (tab.cost_rhs != 0) {
            LpOutcome out;
            out.status = LpStatus::Infeasible;
            return out;
        }
        // Drive leftover artificials out of the basis; a row with no usable
        // pivot is redundant and gets neutralized instead of dropped.
        for (int i = 0; i < m; ++i) {
            if (tab.basis[i] < art_begin) continue;
            int pcol = -1;
            for (int j = 0; j < art_begin; ++j)
                if (tab.a[i][j] != 0) {
                    pcol = j;
                    break;
                }
            if (pcol >= 0) tab.pivot(i, pcol);
        }
    }

    // Phase 2 objective over the current basis; artificials are frozen by a
    // prohibitive reduced cost only if still basic on a redundant row (their
    // value is zero and they can never re-enter since we never price them).
    std::vector<Rat> phase2(tab.cols, Rat(0));
    for (const auto& [var, coef] : model.objective)
        phase2[var] += model.sense == Sense::Min ? coef : -coef;
    tab.cost = phase2;
    tab.cost_rhs = 0;
    for (int i = 0; i < m; ++i) {
        int bj = tab.basis[i];
        Rat cf = tab.cost[bj];
        if (cf == 0) continue;
        for (int j = 0; j < tab.cols; ++j)
            if (tab.a[i][j] != 0) tab.cost[j] -= cf * tab.a[i][j];
        tab.cost_rhs -= cf * tab.rhs[i];
    }
    // Never let an artificial re-enter.
    for (int j = art_begin; j < tab.cols; ++j)
        if (tab.cost[j] < 0) tab.cost[j] = 0;

    bool unbounded = false;
    while (tab.step(unbounded)) {
        for (int j = art_begin; j < tab.cols; ++j)
            if (tab.cost[j] < 0) tab.cost[j] = 0;
    }
    LpOutcome out;
    if (unbounded) {
        out.status = LpStatus::Unbounded;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.values.assign(n, Rat(0));
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < n) out.values[tab.basis[i]] = tab.rhs[i];
    Rat obj = -tab.cost_rhs;
    out.objective = model.sense == Sense::Min ? obj : -obj;

    // Exactness audit: the reported point must satisfy every row and price
    // out to the reported objective.
    if (!check_feasible_point(model, out.values).empty())
        throw InternalError("simplex returned an infeasible point");
    Rat priced = 0;
    for (const auto& [var, coef] : model.objective) priced += coef * out.values[var];
    if (priced != out.objective)
        throw InternalError("simplex objective does not match its point");
    return out;
}

std::vector<RowViolation> check_feasible_point(const LpModel& model,
                                               const std::vector<Rat>& point) {
    if (static_cast<int>(point.size()) != model.var_count)
        throw InternalError("check_feasible_point: point does not assign all variables");
    std::vector<RowViolation> out;
    for (int j = 0; j < model.var_count; ++j)
        if (point[j] < 0) out.push_back({-1 - j, point[j]});
    for (int i = 0; i < static_cast<int>(model.rows.size()); ++i) {
        const auto& row = model.rows[i];
        Rat lhs = 0;
        for (const auto& [var, coef] : row.coeffs) lhs += coef * point[var];
        Rat slack;
        switch (row.rel) {
            case Rel::Le: slack = row.rhs - lhs; break;
            case Rel::Ge: slack = lhs - row.rhs; break;
            case Rel::Eq: slack = lhs >= row.rhs ? row.rhs - lhs : lhs - row.rhs; break;
        }
        if (slack < 0) out.push_back({i, slack});
    }
    return out;
}

}  // namespace pathtsp
