#include "topt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace topt {

namespace {

double sq_dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

void validate_measure(const DiscreteMeasure& m, const char* who) {
    if (m.points.size() != m.weights.size())
        throw std::invalid_argument(std::string(who) + ": points/weights length mismatch");
    if (m.points.empty()) throw std::invalid_argument(std::string(who) + ": empty measure");
    double s = 0;
    for (double w : m.weights) {
        if (w < 0) throw std::invalid_argument(std::string(who) + ": negative weight");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": weights must sum to 1");
}

// Transportation simplex on the dense bipartite problem. The basis is a
// spanning tree over sources+sinks; supplies carry a deterministic tiny
// perturbation against degenerate pivoting, and the final flows are
// recomputed from the unperturbed marginals on the optimal tree.
class TransportSimplex {
public:
    TransportSimplex(const std::vector<double>& a, const std::vector<double>& b,
                     const std::vector<double>& cost)
        : ns_(static_cast<int>(a.size())), nt_(static_cast<int>(b.size())), cost_(cost) {
        a_ = a;
        b_ = b;
        // deterministic multiplicative-congruential perturbation
        std::uint64_t state = 0x9E3779B97F4A7C15ull;
        double xi = 1e-11 / ns_;
        double added = 0;
        for (auto& v : a_) {
            state = state * 6364136223846793005ull + 1442695040888963407ull;
            double u = 0.25 + 0.5 * (double(state >> 11) / 9007199254740992.0);
            v += xi * u;
            added += xi * u;
        }
        b_.back() += added;
    }

    void solve() {
        init_northwest();
        compute_potentials();
        const long long max_pivots = 1000000;
        const int total = ns_ * nt_;
        const int block = std::max(256, total / 64);
        int cursor = 0;
        for (long long pivot = 0; pivot < max_pivots; ++pivot) {
            int enter = -1;
            double best = -1e-12 * cost_scale();
            int scanned = 0;
            while (scanned < total) {
                int stop = std::min(cursor + block, total);
                for (int k = cursor; k < stop; ++k) {
                    int i = k / nt_, j = k % nt_;
                    double rc = cost_[k] - u_[i] - v_[j];
                    if (rc < best) { best = rc; enter = k; }
                }
                scanned += stop - cursor;
                cursor = stop == total ? 0 : stop;
                if (enter >= 0) break;
            }
            if (enter < 0) return;  // dual feasible: optimal
            do_pivot(enter / nt_, enter % nt_);
            compute_potentials();
        }
        throw std::runtime_error("w2_exact: pivot limit exceeded");
    }

    // Exact flows for the unperturbed marginals on the final tree.
    std::vector<PlanEntry> extract_plan(const std::vector<double>& a0,
                                        const std::vector<double>& b0) const {
        int n = ns_ + nt_;
        std::vector<double> excess(n, 0.0);
        for (int i = 0; i < ns_; ++i) excess[i] = a0[i];
        for (int j = 0; j < nt_; ++j) excess[ns_ + j] = -b0[j];
        std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, cell)
        for (int k = 0; k < static_cast<int>(cells_.size()); ++k) {
            auto [i, j] = cells_[k];
            adj[i].push_back({ns_ + j, k});
            adj[ns_ + j].push_back({i, k});
        }
        std::vector<int> degree(n);
        for (int x = 0; x < n; ++x) degree[x] = static_cast<int>(adj[x].size());
        std::vector<char> removed_cell(cells_.size(), 0), removed_node(n, 0);
        std::vector<double> flow(cells_.size(), 0.0);
        std::vector<int> leaves;
        for (int x = 0; x < n; ++x)
            if (degree[x] == 1) leaves.push_back(x);
        // peel leaves; each leaf fixes the flow on its unique remaining cell
        while (!leaves.empty()) {
            int x = leaves.back();
            leaves.pop_back();
            if (removed_node[x] || degree[x] == 0) continue;
            removed_node[x] = 1;
            for (auto [y, k] : adj[x]) {
                if (removed_cell[k]) continue;
                double f = x < ns_ ? excess[x] : -excess[x];
                flow[k] = f;
                excess[x] = 0;
                excess[y] += (y < ns_) ? -f : f;
                removed_cell[k] = 1;
                if (--degree[y] == 1) leaves.push_back(y);
                --degree[x];
                break;
            }
        }
        std::vector<PlanEntry> plan;
        for (int k = 0; k < static_cast<int>(cells_.size()); ++k) {
            double f = flow[k];
            if (f < 0) {
                if (f < -1e-9) throw std::runtime_error("w2_exact: infeasible degenerate flow");
                f = 0;
            }
            if (f > 0) plan.push_back({cells_[k].first, cells_[k].second, f});
        }
        return plan;
    }

private:
    double cost_scale() const {
        double m = 1.0;
        for (double c : cost_) m = std::max(m, std::abs(c));
        return m;
    }

    void init_northwest() {
        std::vector<double> a = a_, b = b_;
        int i = 0, j = 0;
        cells_.clear();
        flows_.clear();
        while (true) {
            double f = std::min(a[i], b[j]);
            cells_.push_back({i, j});
            flows_.push_back(f);
            a[i] -= f;
            b[j] -= f;
            if (i == ns_ - 1 && j == nt_ - 1) break;
            if (a[i] <= b[j] && i < ns_ - 1)
                ++i;
            else
                ++j;
        }
        rebuild_adjacency();
    }

    void rebuild_adjacency() {
        adj_.assign(ns_ + nt_, {});
        for (int k = 0; k < static_cast<int>(cells_.size()); ++k) {
            auto [i, j] = cells_[k];
            adj_[i].push_back({ns_ + j, k});
            adj_[ns_ + j].push_back({i, k});
        }
    }

    void compute_potentials() {
        u_.assign(ns_, 0.0);
        v_.assign(nt_, 0.0);
        std::vector<char> seen(ns_ + nt_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (auto [y, k] : adj_[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                auto [i, j] = cells_[k];
                if (y >= ns_)
                    v_[j] = cost_[i * nt_ + j] - u_[i];
                else
                    u_[i] = cost_[i * nt_ + j] - v_[j];
                stack.push_back(y);
            }
        }
    }

    // Pivot in cell (ei, ej): find the tree path from source ei to sink ej,
    // alternate +/- around the cycle, remove the smallest '-' cell.
    void do_pivot(int ei, int ej) {
        int n = ns_ + nt_;
        std::vector<int> par_node(n, -1), par_cell(n, -1);
        std::vector<char> seen(n, 0);
        std::vector<int> stack{ei};
        seen[ei] = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            if (x == ns_ + ej) break;
            for (auto [y, k] : adj_[x]) {
                if (seen[y]) continue;
                seen[y] = 1;
                par_node[y] = x;
                par_cell[y] = k;
                stack.push_back(y);
            }
        }
        if (!seen[ns_ + ej]) throw std::runtime_error("w2_exact: basis not spanning");

        // walk back from sink to source; signs alternate, the entering cell is '+'
        std::vector<int> path_cells;
        for (int x = ns_ + ej; x != ei; x = par_node[x]) path_cells.push_back(par_cell[x]);
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        // cells along the path, nearest-to-sink first; entering arc sign '+'
        // means the first path cell (into the sink) is '-'
        for (std::size_t idx = 0; idx < path_cells.size(); ++idx) {
            if (idx % 2 == 0) {
                int k = path_cells[idx];
                if (flows_[k] < theta) {
                    theta = flows_[k];
                    leave = k;
                }
            }
        }
        if (leave < 0) throw std::runtime_error("w2_exact: no leaving arc");
        for (std::size_t idx = 0; idx < path_cells.size(); ++idx)
            flows_[path_cells[idx]] += (idx % 2 == 0) ? -theta : theta;
        cells_[leave] = {ei, ej};
        flows_[leave] = theta;
        rebuild_adjacency();
    }

    int ns_, nt_;
    std::vector<double> a_, b_;
    const std::vector<double>& cost_;
    std::vector<std::pair<int, int>> cells_;
    std::vector<double> flows_;
    std::vector<std::vector<std::pair<int, int>>> adj_;
    std::vector<double> u_, v_;
};

}  // namespace

ExactW2Result w2_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    validate_measure(mu, "w2_exact(mu)");
    validate_measure(nu, "w2_exact(nu)");
    const int ns = static_cast<int>(mu.points.size());
    const int nt = static_cast<int>(nu.points.size());
    if (ns > 512 || nt > 512)
        throw std::invalid_argument("w2_exact: support too large (max 512), use w2_entropic");

    std::vector<double> cost(static_cast<std::size_t>(ns) * nt);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            cost[static_cast<std::size_t>(i) * nt + j] = sq_dist(mu.points[i], nu.points[j]);

    TransportSimplex simplex(mu.weights, nu.weights, cost);
    simplex.solve();

    ExactW2Result res;
    res.plan.entries = simplex.extract_plan(mu.weights, nu.weights);
    double total = 0;
    for (const auto& e : res.plan.entries)
        total += e.mass * cost[static_cast<std::size_t>(e.i) * nt + e.j];
    res.distance = std::sqrt(std::max(0.0, total));
    return res;
}

namespace {

// One Sinkhorn fixed point in the log domain; returns <pi, C>.
double sinkhorn_cost(const std::vector<double>& loga, const std::vector<double>& logb,
                     const std::vector<double>& cost, int ns, int nt, double reg_final,
                     double reg_start, int stages, int max_iter, double marg_tol) {
    std::vector<double> f(ns, 0.0), g(nt, 0.0), g_new(nt, 0.0);
    double reg = reg_start;
    for (int stage = 0; stage < stages; ++stage) {
        if (stage == stages - 1) reg = reg_final;
        int iters = stage == stages - 1 ? 20 * max_iter : max_iter;
        for (int it = 0; it < iters; ++it) {
            // f-update makes the row marginals exact for the current g
            for (int i = 0; i < ns; ++i) {
                double m = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < nt; ++j)
                    m = std::max(m, (g[j] - cost[static_cast<std::size_t>(i) * nt + j]) / reg + logb[j]);
                double s = 0;
                for (int j = 0; j < nt; ++j)
                    s += std::exp((g[j] - cost[static_cast<std::size_t>(i) * nt + j]) / reg + logb[j] - m);
                f[i] = -reg * (m + std::log(s));
            }
            // column violation of the implied plan: col_j = b_j e^{(g_j - g*_j)/reg}
            double max_viol = 0;
            for (int j = 0; j < nt; ++j) {
                double m = -std::numeric_limits<double>::infinity();
                for (int i = 0; i < ns; ++i)
                    m = std::max(m, (f[i] - cost[static_cast<std::size_t>(i) * nt + j]) / reg + loga[i]);
                double s = 0;
                for (int i = 0; i < ns; ++i)
                    s += std::exp((f[i] - cost[static_cast<std::size_t>(i) * nt + j]) / reg + loga[i] - m);
                g_new[j] = -reg * (m + std::log(s));
                double col = std::exp(logb[j] + (g[j] - g_new[j]) / reg);
                max_viol = std::max(max_viol, std::abs(col - std::exp(logb[j])));
            }
            if (stage == stages - 1 && max_viol < marg_tol) break;  // rows already exact
            g.swap(g_new);
        }
        if (stage < stages - 1) reg *= std::pow(reg_final / reg_start, 1.0 / std::max(1, stages - 1));
    }
    reg = reg_final;
    // pi_ij = exp((f_i + g_j - C_ij)/reg + loga_i + logb_j), rounded onto the
    // exact marginals (row/column rescaling plus a rank-one correction) so a
    // truncated iteration cannot leave a biased plan behind
    std::vector<double> pi(static_cast<std::size_t>(ns) * nt);
    std::vector<double> a(ns), b(nt), row_mass(ns, 0.0), col_mass(nt, 0.0);
    for (int i = 0; i < ns; ++i) a[i] = std::exp(loga[i]);
    for (int j = 0; j < nt; ++j) b[j] = std::exp(logb[j]);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * nt + j;
            double p = std::exp((f[i] + g[j] - cost[k]) / reg + loga[i] + logb[j]);
            pi[k] = p;
            row_mass[i] += p;
        }
    for (int i = 0; i < ns; ++i) {
        double x = row_mass[i] > a[i] ? a[i] / row_mass[i] : 1.0;
        for (int j = 0; j < nt; ++j) col_mass[j] += (pi[static_cast<std::size_t>(i) * nt + j] *= x);
    }
    std::fill(row_mass.begin(), row_mass.end(), 0.0);
    for (int j = 0; j < nt; ++j) {
        double y = col_mass[j] > b[j] ? b[j] / col_mass[j] : 1.0;
        for (int i = 0; i < ns; ++i)
            row_mass[i] += (pi[static_cast<std::size_t>(i) * nt + j] *= y);
    }
    std::fill(col_mass.begin(), col_mass.end(), 0.0);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) col_mass[j] += pi[static_cast<std::size_t>(i) * nt + j];
    double deficit = 0;
    for (int i = 0; i < ns; ++i) deficit += a[i] - row_mass[i];
    if (deficit > 0) {
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < nt; ++j)
                pi[static_cast<std::size_t>(i) * nt + j] +=
                    (a[i] - row_mass[i]) * (b[j] - col_mass[j]) / deficit;
    }

    double value = 0;
    std::fill(row_mass.begin(), row_mass.end(), 0.0);
    std::fill(col_mass.begin(), col_mass.end(), 0.0);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) {
            std::size_t k = static_cast<std::size_t>(i) * nt + j;
            value += pi[k] * cost[k];
            row_mass[i] += pi[k];
            col_mass[j] += pi[k];
        }
    double viol = 0;
    for (int i = 0; i < ns; ++i) viol = std::max(viol, std::abs(row_mass[i] - a[i]));
    for (int j = 0; j < nt; ++j) viol = std::max(viol, std::abs(col_mass[j] - b[j]));
    if (viol > 1e-6) throw std::runtime_error("w2_entropic: marginal violation above 1e-6");
    return value;
}

double entropic_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double reg_final) {
    const int ns = static_cast<int>(mu.points.size());
    const int nt = static_cast<int>(nu.points.size());
    std::vector<double> cost(static_cast<std::size_t>(ns) * nt);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j)
            cost[static_cast<std::size_t>(i) * nt + j] = sq_dist(mu.points[i], nu.points[j]);
    const double tiny = 1e-300;
    std::vector<double> loga(ns), logb(nt);
    for (int i = 0; i < ns; ++i) loga[i] = std::log(std::max(mu.weights[i], tiny));
    for (int j = 0; j < nt; ++j) logb[j] = std::log(std::max(nu.weights[j], tiny));
    double diam2 = 0;
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nt; ++j) diam2 = std::max(diam2, cost[static_cast<std::size_t>(i) * nt + j]);
    for (int i = 0; i < ns; ++i)
        for (int k = 0; k < ns; ++k) diam2 = std::max(diam2, sq_dist(mu.points[i], mu.points[k]));
    if (diam2 == 0) return 0;
    double reg_start = 0.1 * diam2;
    if (reg_final <= 0) reg_final = 1e-3 * diam2;
    return sinkhorn_cost(loga, logb, cost, ns, nt, reg_final, reg_start, 10, 500, 1e-8);
}

}  // namespace

double w2_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double reg,
                   int /*max_iter*/) {
    validate_measure(mu, "w2_entropic(mu)");
    validate_measure(nu, "w2_entropic(nu)");
    double ab = entropic_ot(mu, nu, reg);
    double aa = entropic_ot(mu, mu, reg);
    double bb = entropic_ot(nu, nu, reg);
    double div = ab - 0.5 * (aa + bb);
    return std::sqrt(std::max(0.0, div));
}

DiscreteMeasure nodal_measure(const Mesh& mesh, const DensityField& rho) {
    if (static_cast<int>(rho.values.size()) != mesh.node_count())
        throw std::invalid_argument("nodal_measure: density length mismatch");
    SparseMatrix mass = assemble_mass(mesh);
    std::vector<double> w = matvec(mass, rho.values);
    double total = 0;
    for (auto& v : w) {
        if (v < 0) v = 0;
        total += v;
    }
    if (!(total > 0)) throw std::invalid_argument("nodal_measure: zero total mass");
    DiscreteMeasure m;
    m.points = mesh.nodes;
    m.weights.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) m.weights[i] = w[i] / total;
    return m;
}

DiscreteMeasure coarsen_measure(const DiscreteMeasure& m, double lx, double ly, int cells) {
    if (cells < 1) throw std::invalid_argument("coarsen_measure: cells must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(cells) * cells, 0.0);
    for (std::size_t k = 0; k < m.points.size(); ++k) {
        int ci = std::min(cells - 1, std::max(0, static_cast<int>(m.points[k][0] / lx * cells)));
        int cj = std::min(cells - 1, std::max(0, static_cast<int>(m.points[k][1] / ly * cells)));
        w[static_cast<std::size_t>(cj) * cells + ci] += m.weights[k];
    }
    DiscreteMeasure out;
    for (int cj = 0; cj < cells; ++cj)
        for (int ci = 0; ci < cells; ++ci) {
            double v = w[static_cast<std::size_t>(cj) * cells + ci];
            if (v <= 0) continue;
            out.points.push_back({(ci + 0.5) * lx / cells, (cj + 0.5) * ly / cells});
            out.weights.push_back(v);
        }
    return out;
}

}  // namespace topt
