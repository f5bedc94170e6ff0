#include "driftstab/drift_lab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>

#include "driftstab/errors.hpp"

namespace driftstab::driftlab {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kResidualTol = 1e-12;

Eigen::ArrayXd mask_of(const std::vector<int>& states, int n,
                       const char* what) {
  Eigen::ArrayXd m = Eigen::ArrayXd::Zero(n);
  for (int s : states) {
    if (s < 0 || s >= n) {
      throw InputError(std::string(what) + ": state index out of range");
    }
    m[s] = 1.0;
  }
  return m;
}

// Solves (I - P diag(mask)) x = rhs; mask selects the states whose value
// feeds back (the "not yet absorbed" ones).
Eigen::VectorXd solve_absorbing(const FiniteChain& chain,
                                const Eigen::ArrayXd& continue_mask,
                                const Eigen::VectorXd& rhs) {
  const int n = chain.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) -
                      chain.P * continue_mask.matrix().asDiagonal();
  Eigen::VectorXd x = A.partialPivLu().solve(rhs);
  const double residual = (A * x - rhs).lpNorm<Eigen::Infinity>();
  if (!(residual < 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))) {
    throw StructureError(
        "first-passage system is singular; is the set reachable from "
        "everywhere?");
  }
  return x;
}

bool reaches_everywhere(const FiniteChain& chain,
                        const std::vector<int>& target) {
  // BFS on the reversed positive digraph from the target set.
  const int n = chain.n();
  std::vector<char> seen(n, 0);
  std::deque<int> queue;
  for (int s : target) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u = 0; u < n; ++u) {
      if (!seen[u] && chain.P(u, v) > 0.0) {
        seen[u] = 1;
        queue.push_back(u);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace

void validate_chain(const FiniteChain& chain) {
  const int n = chain.n();
  if (n < 1 || chain.P.cols() != n) {
    throw StructureError("chain: transition matrix must be square");
  }
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = chain.P(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw StructureError("chain: negative or non-finite entry at row " +
                             std::to_string(i));
      }
      row += v;
    }
    if (std::fabs(row - 1.0) > kRowSumTol) {
      throw StructureError("chain: row " + std::to_string(i) +
                           " sums to " + std::to_string(row));
    }
  }
}

std::vector<std::vector<int>> communicating_classes(const FiniteChain& chain) {
  // Iterative Tarjan on the positive-entry digraph.
  const int n = chain.n();
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> classes;
  int next_index = 0;

  struct Frame {
    int v;
    int next_child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root, 0});
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      bool descended = false;
      for (int w = fr.next_child; w < n; ++w) {
        if (chain.P(fr.v, w) <= 0.0) continue;
        fr.next_child = w + 1;
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
      }
      if (descended) continue;
      if (fr.next_child >= n || fr.next_child == n) {
        // finished v
        const int v = fr.v;
        call.pop_back();
        if (!call.empty()) {
          low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
        if (low[v] == index[v]) {
          std::vector<int> cls;
          while (true) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            cls.push_back(w);
            if (w == v) break;
          }
          std::sort(cls.begin(), cls.end());
          classes.push_back(std::move(cls));
        }
      }
    }
  }
  return classes;
}

bool is_irreducible(const FiniteChain& chain) {
  return communicating_classes(chain).size() == 1;
}

Eigen::VectorXd stationary_dist(const FiniteChain& chain) {
  validate_chain(chain);
  const auto classes = communicating_classes(chain);
  if (classes.size() != 1) {
    std::ostringstream os;
    os << "stationary_dist: chain is reducible; communicating classes:";
    for (const auto& cls : classes) {
      os << " {";
      for (std::size_t i = 0; i < cls.size(); ++i) {
        os << (i ? "," : "") << cls[i];
      }
      os << "}";
    }
    throw StructureError(os.str());
  }
  const int n = chain.n();
  // pi (P - I) = 0 with one equation replaced by the normalization. The
  // columns of P^T - I sum to zero, so dropping any row keeps full rank.
  Eigen::MatrixXd A = chain.P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  Eigen::VectorXd pi = A.fullPivLu().solve(rhs);
  const double residual =
      (chain.P.transpose() * pi - pi).lpNorm<Eigen::Infinity>();
  if (!(residual < kResidualTol)) {
    throw StructureError("stationary_dist: residual " +
                         std::to_string(residual) + " exceeds 1e-12");
  }
  return pi;
}

KacResult kac_moment(const FiniteChain& chain, const Eigen::VectorXd& f,
                     const std::vector<int>& A) {
  validate_chain(chain);
  if (A.empty()) {
    throw InputError("kac_moment: A must be nonempty");
  }
  if ((f.array() < 0.0).any()) {
    throw InputError("kac_moment: f must be nonnegative");
  }
  const Eigen::VectorXd pi = stationary_dist(chain);
  const int n = chain.n();
  const Eigen::ArrayXd inA = mask_of(A, n, "kac_moment");
  // g(phi) = f(phi) + sum_{y not in A} P(phi,y) g(y): the expected f-cost
  // accumulated until the return to A (t >= 1), started anywhere.
  const Eigen::VectorXd g = solve_absorbing(chain, 1.0 - inA, f);

  KacResult res;
  res.lhs = pi.dot(f);
  res.rhs = (pi.array() * inA * g.array()).sum();
  return res;
}

Eigen::VectorXd hitting_cost(const FiniteChain& chain, const Eigen::VectorXd& f,
                             const std::vector<int>& C, bool inclusive) {
  validate_chain(chain);
  if (C.empty()) {
    throw InputError("hitting_cost: C must be nonempty");
  }
  if (!reaches_everywhere(chain, C)) {
    throw StructureError("hitting_cost: C is not reachable from every state");
  }
  const int n = chain.n();
  const Eigen::ArrayXd inC = mask_of(C, n, "hitting_cost");
  if (!inclusive) {
    // Return-time cost, summing f over t = 0 .. tau_C - 1.
    return solve_absorbing(chain, 1.0 - inC, f);
  }
  // First-hitting cost summed through the hitting state: V* = f on C,
  // V* = f + P V* off C, i.e. (I - diag(offC) P) V* = f.
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) -
                      (1.0 - inC).matrix().asDiagonal() * chain.P;
  Eigen::VectorXd v = M.partialPivLu().solve(f);
  const double residual = (M * v - f).lpNorm<Eigen::Infinity>();
  if (!(residual < 1e-8 * std::max(1.0, f.lpNorm<Eigen::Infinity>()))) {
    throw StructureError("hitting_cost: singular system");
  }
  return v;
}

double v3_constant(const FiniteChain& chain, const Eigen::VectorXd& f,
                   const std::vector<int>& C) {
  const Eigen::VectorXd vstar = hitting_cost(chain, f, C, true);
  const Eigen::VectorXd pv = chain.P * vstar;
  double b = -std::numeric_limits<double>::infinity();
  for (int s : C) {
    b = std::max(b, pv[s] - vstar[s] + f[s]);
  }
  return b;
}

void validate_spec(const FiniteChain& chain, const DriftSpec& spec) {
  const int n = chain.n();
  if (spec.V.size() != n || spec.f.size() != n || spec.delta.size() != n) {
    throw ConfigError("drift spec: V, f, delta must have one entry per state");
  }
  if ((spec.V.array() <= 0.0).any()) {
    throw ConfigError("drift spec: V must be positive");
  }
  if ((spec.f.array() < 1.0).any()) {
    throw ConfigError("drift spec: f must be >= 1 pointwise");
  }
  if ((spec.delta.array() < 1.0).any()) {
    throw ConfigError("drift spec: delta must be >= 1 pointwise");
  }
  if (spec.C.empty()) {
    throw ConfigError("drift spec: C must be nonempty");
  }
  mask_of(spec.C, n, "drift spec C");
  switch (spec.stop.kind) {
    case StopRule::Kind::FixedN:
      if (spec.stop.n < 1) {
        throw ConfigError("drift spec: fixed stop length must be >= 1");
      }
      break;
    case StopRule::Kind::StateDependent:
      if (static_cast<int>(spec.stop.n_per_state.size()) != n) {
        throw ConfigError(
            "drift spec: state-dependent rule needs one length per state");
      }
      for (int v : spec.stop.n_per_state) {
        if (v < 1) {
          throw ConfigError("drift spec: block lengths must be >= 1");
        }
      }
      break;
    case StopRule::Kind::Hitting:
      if (spec.stop.target.empty()) {
        throw ConfigError("drift spec: hitting rule needs a target set");
      }
      mask_of(spec.stop.target, n, "drift spec target");
      if (!reaches_everywhere(chain, spec.stop.target)) {
        throw StructureError(
            "drift spec: hitting target not reachable from every state "
            "(stopping rule not integrable)");
      }
      break;
  }
}

namespace {

// Exact per-state block quantities for one stopping rule:
//   EV(phi)  = E[V(phi at next stop) | start phi]
//   Ef(phi)  = E[sum of f over the block | start phi]
//   ET(phi)  = E[block length | start phi]
struct BlockMoments {
  Eigen::VectorXd EV, Ef, ET;
};

BlockMoments block_moments(const FiniteChain& chain, const DriftSpec& spec) {
  const int n = chain.n();
  BlockMoments bm;
  switch (spec.stop.kind) {
    case StopRule::Kind::FixedN:
    case StopRule::Kind::StateDependent: {
      int max_n = spec.stop.n;
      std::vector<int> len(n, spec.stop.n);
      if (spec.stop.kind == StopRule::Kind::StateDependent) {
        len = spec.stop.n_per_state;
        max_n = *std::max_element(len.begin(), len.end());
      }
      // Powers P^j V and partial sums of P^j f, j < max_n.
      std::vector<Eigen::VectorXd> pv(static_cast<std::size_t>(max_n) + 1);
      std::vector<Eigen::VectorXd> pf_sum(static_cast<std::size_t>(max_n) + 1);
      pv[0] = spec.V;
      pf_sum[0] = Eigen::VectorXd::Zero(n);
      Eigen::VectorXd pf = spec.f;
      for (int j = 1; j <= max_n; ++j) {
        pv[static_cast<std::size_t>(j)] =
            chain.P * pv[static_cast<std::size_t>(j - 1)];
        pf_sum[static_cast<std::size_t>(j)] =
            pf_sum[static_cast<std::size_t>(j - 1)] + pf;
        pf = chain.P * pf;
      }
      bm.EV.resize(n);
      bm.Ef.resize(n);
      bm.ET.resize(n);
      for (int s = 0; s < n; ++s) {
        const std::size_t L = static_cast<std::size_t>(len[s]);
        bm.EV[s] = pv[L][s];
        bm.Ef[s] = pf_sum[L][s];
        bm.ET[s] = static_cast<double>(len[s]);
      }
      break;
    }
    case StopRule::Kind::Hitting: {
      const Eigen::ArrayXd inT = mask_of(spec.stop.target, n, "target");
      const Eigen::ArrayXd cont = 1.0 - inT;
      // E[V at the first entry into the target (t >= 1)]:
      // zeta = P (1_T V + 1_{T^c} zeta).
      bm.EV = solve_absorbing(chain, cont,
                              Eigen::VectorXd(chain.P * (inT * spec.V.array())
                                                  .matrix()));
      bm.Ef = solve_absorbing(chain, cont, spec.f);
      bm.ET = solve_absorbing(chain, cont, Eigen::VectorXd::Ones(n));
      break;
    }
  }
  return bm;
}

}  // namespace

DriftReport verify_random_time_drift(const FiniteChain& chain,
                                     const DriftSpec& spec) {
  validate_chain(chain);
  validate_spec(chain, spec);
  const int n = chain.n();
  const BlockMoments bm = block_moments(chain, spec);
  const Eigen::ArrayXd inC = mask_of(spec.C, n, "C");

  DriftReport rep;
  rep.ineq1_ok_all = rep.ineq1_ok_off_C = rep.ineq2_ok_all = true;
  rep.min_b = -std::numeric_limits<double>::infinity();
  rep.max_ET = 0.0;
  for (int s = 0; s < n; ++s) {
    DriftStateRow row;
    row.state = s;
    row.in_C = inC[s] > 0.0;
    row.V = spec.V[s];
    row.delta = spec.delta[s];
    row.EV_next = bm.EV[s];
    row.Ef_block = bm.Ef[s];
    row.ET_block = bm.ET[s];
    row.ineq1_margin =
        spec.V[s] - spec.delta[s] + (row.in_C ? spec.b : 0.0) - bm.EV[s];
    row.ineq1_ok = row.ineq1_margin >= 0.0;
    row.ineq2_margin = spec.delta[s] - bm.Ef[s];
    row.ineq2_ok = row.ineq2_margin >= 0.0;

    rep.ineq1_ok_all = rep.ineq1_ok_all && row.ineq1_ok;
    if (!row.in_C) {
      rep.ineq1_ok_off_C = rep.ineq1_ok_off_C && row.ineq1_ok;
    } else {
      rep.min_b = std::max(rep.min_b, bm.EV[s] - spec.V[s] + spec.delta[s]);
    }
    rep.ineq2_ok_all = rep.ineq2_ok_all && row.ineq2_ok;
    rep.max_ET = std::max(rep.max_ET, row.ET_block);
    rep.rows.push_back(row);
  }
  return rep;
}

SupermartingaleReport supermartingale_check(const FiniteChain& chain,
                                            const DriftSpec& spec, int horizon,
                                            double prune_prob,
                                            long long max_prefixes) {
  validate_chain(chain);
  validate_spec(chain, spec);
  const int n = chain.n();
  if (horizon < 1) {
    throw InputError("supermartingale_check: horizon >= 1 required");
  }
  // Enumeration guard; the pruned tree can still be exponential.
  double bound = 1.0;
  for (int i = 0; i < horizon; ++i) {
    bound *= static_cast<double>(n);
    if (bound > static_cast<double>(max_prefixes)) {
      throw InputError(
          "supermartingale_check: horizon too large for enumeration (raise "
          "max_prefixes or shrink the horizon)");
    }
  }

  const BlockMoments bm = block_moments(chain, spec);
  const Eigen::ArrayXd inC = mask_of(spec.C, n, "C");
  // Conditional one-block drifts, exact per stop state:
  //   f-sequence:     E[V_next + block f-sum] - V - b 1_C
  //   delta-sequence: E[V_next] - V + delta - b 1_C
  Eigen::VectorXd drift_f =
      bm.EV + bm.Ef - spec.V - spec.b * inC.matrix();
  Eigen::VectorXd drift_delta =
      bm.EV - spec.V + spec.delta - spec.b * inC.matrix();

  SupermartingaleReport rep;
  rep.min_slack_f = std::numeric_limits<double>::infinity();
  rep.min_slack_delta = std::numeric_limits<double>::infinity();

  // Depth-first walk over path prefixes. A prefix contributes a check each
  // time it stands at a stopping time T_z (the start itself is T_0 = 0).
  struct Node {
    int state;
    long long t;
    double prob;
    int z;              // stops so far (state is the z-th stop iff at_stop)
    int steps_to_stop;  // for fixed/state-dependent rules
  };
  const bool hitting = spec.stop.kind == StopRule::Kind::Hitting;
  Eigen::ArrayXd inTarget = Eigen::ArrayXd::Zero(n);
  if (hitting) inTarget = mask_of(spec.stop.target, n, "target");

  auto block_len = [&](int s) {
    return spec.stop.kind == StopRule::Kind::StateDependent
               ? spec.stop.n_per_state[static_cast<std::size_t>(s)]
               : spec.stop.n;
  };

  for (int start = 0; start < n; ++start) {
    std::vector<Node> stack;
    stack.push_back({start, 0, 1.0, 0, hitting ? -1 : block_len(start)});
    while (!stack.empty()) {
      const Node node = stack.back();
      stack.pop_back();
      const bool at_stop =
          node.t == 0 ||
          (hitting ? inTarget[node.state] > 0.0 : node.steps_to_stop == 0);
      if (at_stop) {
        ++rep.prefixes_checked;
        if (rep.prefixes_checked > max_prefixes) {
          throw InputError(
              "supermartingale_check: enumeration exceeded max_prefixes");
        }
        const double df = drift_f[node.state];
        const double dd = drift_delta[node.state];
        rep.min_slack_f = std::min(rep.min_slack_f, -df);
        rep.min_slack_delta = std::min(rep.min_slack_delta, -dd);
        if (df > 1e-9) {
          rep.ok_f = false;
          if (rep.violations.size() < 64) {
            rep.violations.push_back(
                {start, node.state, node.t, node.z, 'f', df});
          }
        }
        if (dd > 1e-9) {
          rep.ok_delta = false;
          if (rep.violations.size() < 64) {
            rep.violations.push_back(
                {start, node.state, node.t, node.z, 'd', dd});
          }
        }
      }
      if (node.t >= horizon) continue;
      const int remaining = at_stop
                                ? (hitting ? -1 : block_len(node.state))
                                : node.steps_to_stop;
      for (int next = 0; next < n; ++next) {
        const double pr = node.prob * chain.P(node.state, next);
        if (pr <= prune_prob) continue;
        stack.push_back({next, node.t + 1, pr, node.z + (at_stop ? 1 : 0),
                         hitting ? -1 : remaining - 1});
      }
    }
  }
  return rep;
}

PiFBoundReport verify_pi_f_bound(const FiniteChain& chain,
                                 const DriftSpec& spec) {
  validate_chain(chain);
  validate_spec(chain, spec);
  const Eigen::VectorXd pi = stationary_dist(chain);
  const Eigen::VectorXd vstar = hitting_cost(chain, spec.f, spec.C, true);
  const Eigen::VectorXd pv = chain.P * vstar;

  PiFBoundReport rep;
  rep.pi_f = pi.dot(spec.f);
  rep.b_f = v3_constant(chain, spec.f, spec.C);
  double pi_C = 0.0;
  double on_C_sum = 0.0;
  for (int s : spec.C) {
    pi_C += pi[s];
    on_C_sum += pi[s] * (pv[s] - vstar[s] + spec.f[s]);
  }
  rep.pi_C = pi_C;
  rep.bound = rep.b_f * pi_C;
  // pi-invariance gives pi(f) = sum_C pi (PV* - V* + f) exactly.
  rep.identity_residual = rep.pi_f - on_C_sum;
  rep.ok = rep.pi_f <= rep.b_f + 1e-12;
  return rep;
}

int sample_step(const FiniteChain& chain, int state, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  const int n = chain.n();
  for (int j = 0; j < n; ++j) {
    acc += chain.P(state, j);
    if (u < acc) return j;
  }
  return n - 1;
}

FiniteChain load_chain(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InputError("chain file: no rows");
  }
  const int n = static_cast<int>(rows.size());
  FiniteChain chain;
  chain.P.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n) {
      throw InputError("chain file: row " + std::to_string(i) +
                       " has wrong length");
    }
    for (int j = 0; j < n; ++j) {
      chain.P(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  validate_chain(chain);
  return chain;
}

FiniteChain load_chain_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw InputError("cannot open chain file: " + path);
  }
  return load_chain(is);
}

DriftSpec load_drift_spec(std::istream& is, int n) {
  DriftSpec spec;
  spec.V.resize(0);
  spec.f = Eigen::VectorXd::Ones(n);
  spec.delta = Eigen::VectorXd::Ones(n);
  bool have_V = false, have_stop = false;

  auto parse_vector = [&](std::istringstream& ls, const std::string& key) {
    std::vector<double> vals;
    double v;
    while (ls >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) == 1) {
      return Eigen::VectorXd::Constant(n, vals[0]).eval();
    }
    if (static_cast<int>(vals.size()) != n) {
      throw InputError("drift spec: " + key + " needs 1 or " +
                       std::to_string(n) + " values");
    }
    return Eigen::Map<Eigen::VectorXd>(vals.data(), n).eval();
  };

  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (eq == std::string::npos) {
      throw InputError("drift spec: expected `key = values`, got: " + line);
    }
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    std::istringstream ls(line.substr(eq + 1));
    if (key == "V") {
      spec.V = parse_vector(ls, key);
      have_V = true;
    } else if (key == "f") {
      spec.f = parse_vector(ls, key);
    } else if (key == "delta") {
      spec.delta = parse_vector(ls, key);
    } else if (key == "b") {
      if (!(ls >> spec.b)) throw InputError("drift spec: bad b");
    } else if (key == "C") {
      int s;
      spec.C.clear();
      while (ls >> s) spec.C.push_back(s);
    } else if (key == "stop") {
      std::string kind;
      ls >> kind;
      if (kind == "fixed") {
        spec.stop.kind = StopRule::Kind::FixedN;
        if (!(ls >> spec.stop.n)) throw InputError("drift spec: bad fixed n");
      } else if (kind == "state_dependent") {
        spec.stop.kind = StopRule::Kind::StateDependent;
        int v;
        spec.stop.n_per_state.clear();
        while (ls >> v) spec.stop.n_per_state.push_back(v);
      } else if (kind == "hitting") {
        spec.stop.kind = StopRule::Kind::Hitting;
        int v;
        spec.stop.target.clear();
        while (ls >> v) spec.stop.target.push_back(v);
      } else {
        throw InputError("drift spec: unknown stop rule `" + kind + "`");
      }
      have_stop = true;
    } else {
      throw InputError("drift spec: unknown key `" + key + "`");
    }
  }
  if (!have_V) throw InputError("drift spec: V is required");
  if (!have_stop) throw InputError("drift spec: stop rule is required");
  if (spec.C.empty()) throw InputError("drift spec: C is required");
  return spec;
}

DriftSpec load_drift_spec_file(const std::string& path, int n) {
  std::ifstream is(path);
  if (!is) {
    throw InputError("cannot open drift spec file: " + path);
  }
  return load_drift_spec(is, n);
}

}  // namespace driftstab::driftlab
