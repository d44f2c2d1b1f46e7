#include "exsamp/csp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace exsamp {

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    boost::multiprecision::cpp_int num(s.substr(0, slash));
    boost::multiprecision::cpp_int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  if (digits == "" || digits == "-") throw std::invalid_argument("parse_rational: bad number '" + s + "'");
  boost::multiprecision::cpp_int num(digits);
  boost::multiprecision::cpp_int den = 1;
  for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
  return Rational(num, den);
}

std::size_t CspInstance::table_index(std::span<const std::uint8_t> restricted, int num_labels) {
  std::size_t idx = 0, base = 1;
  for (std::uint8_t l : restricted) {
    idx += l * base;
    base *= num_labels;
  }
  return idx;
}

CspInstance::CspInstance(std::vector<std::string> label_names,
                         std::vector<std::vector<Rational>> unary,
                         std::vector<Constraint> constraints, int k)
    : label_names_(std::move(label_names)),
      unary_(std::move(unary)),
      constraints_(std::move(constraints)),
      k_(k) {
  const int L = num_labels();
  if (L < 1 || L > 32) throw std::invalid_argument("csp: need 1 <= |L| <= 32");
  if (k_ < 1) throw std::invalid_argument("csp: k must be positive");
  const int n = num_vertices();
  support_.resize(n);
  unary_d_.resize(n);
  for (int v = 0; v < n; ++v) {
    if (static_cast<int>(unary_[v].size()) != L)
      throw std::invalid_argument("csp: unary table size mismatch at vertex " + std::to_string(v));
    std::uint32_t mask = 0;
    unary_d_[v].resize(L);
    for (int l = 0; l < L; ++l) {
      if (unary_[v][l] < 0) throw std::invalid_argument("csp: negative unary weight");
      if (unary_[v][l] > 0) mask |= 1u << l;
      unary_d_[v][l] = static_cast<double>(unary_[v][l]);
    }
    if (mask == 0)
      throw std::invalid_argument("csp: vertex " + std::to_string(v) + " has empty label support");
    support_[v] = mask;
  }
  std::size_t total_cof = 0;
  for (std::size_t cid = 0; cid < constraints_.size(); ++cid) {
    Constraint& c = constraints_[cid];
    if (c.members.size() < 2)
      throw std::invalid_argument("csp: singleton constraint sets are forbidden (constraint " +
                                  std::to_string(cid) + ")");
    if (!std::is_sorted(c.members.begin(), c.members.end()) ||
        std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
      throw std::invalid_argument("csp: constraint members must be strictly ascending");
    for (int v : c.members)
      if (v < 0 || v >= n) throw std::invalid_argument("csp: constraint member out of range");
    std::size_t want = 1;
    for (std::size_t i = 0; i < c.members.size(); ++i) want *= L;
    if (c.table.size() != want)
      throw std::invalid_argument("csp: constraint table size mismatch");
    Rational true_max = 0;
    for (const Rational& x : c.table) {
      if (x < 0) throw std::invalid_argument("csp: negative constraint value");
      if (x > true_max) true_max = x;
    }
    if (true_max == 0)
      throw std::invalid_argument("csp: constraint " + std::to_string(cid) +
                                  " is identically zero (C* must be positive)");
    if (c.max_value != true_max)
      throw std::invalid_argument("csp: declared C* does not equal the true maximum (constraint " +
                                  std::to_string(cid) + ")");
    if (c.hub < 0) c.hub = c.members.back();
    if (!std::binary_search(c.members.begin(), c.members.end(), c.hub))
      throw std::invalid_argument("csp: constraint hub must be a member");
    c.ratio.resize(c.table.size());
    for (std::size_t i = 0; i < c.table.size(); ++i)
      c.ratio[i] = static_cast<double>(Rational(c.table[i] / c.max_value));
    total_cof += c.members.size();
  }
  cof_offsets_.assign(n + 1, 0);
  for (const Constraint& c : constraints_)
    for (int v : c.members) cof_offsets_[v + 1]++;
  for (int v = 0; v < n; ++v) cof_offsets_[v + 1] += cof_offsets_[v];
  cof_.resize(total_cof);
  std::vector<int> fill(cof_offsets_.begin(), cof_offsets_.end() - 1);
  for (int cid = 0; cid < num_constraints(); ++cid)
    for (int v : constraints_[cid].members) cof_[fill[v]++] = cid;
}

Rational labeling_weight(const CspInstance& csp, const Labeling& ell) {
  if (static_cast<int>(ell.size()) != csp.num_vertices())
    throw std::invalid_argument("labeling_weight: labeling length mismatch");
  Rational w = 1;
  for (int v = 0; v < csp.num_vertices(); ++v) {
    w *= csp.unary(v, ell[v]);
    if (w == 0) return 0;
  }
  std::vector<std::uint8_t> restricted;
  for (const Constraint& c : csp.constraints()) {
    restricted.clear();
    for (int v : c.members) restricted.push_back(ell[v]);
    w *= c.table[CspInstance::table_index(restricted, csp.num_labels())];
    if (w == 0) return 0;
  }
  return w;
}

bool is_valid(const CspInstance& csp, const Labeling& ell) {
  return labeling_weight(csp, ell) > 0;
}

std::uint64_t encode_labeling(const Labeling& ell, int num_labels) {
  std::uint64_t code = 0, base = 1;
  for (std::uint8_t l : ell) {
    code += l * base;
    base *= num_labels;
  }
  return code;
}

EnumeratedDistribution enumerate_distribution(const CspInstance& csp) {
  const int n = csp.num_vertices();
  const int L = csp.num_labels();
  double bits = n * std::log2(static_cast<double>(L));
  if (bits > 24.0)
    throw std::invalid_argument(
        "enumerate_distribution: |L|^n exceeds 2^24; this is the oracle, not the sampler");
  EnumeratedDistribution out;
  Labeling ell(n, 0);
  Rational z = 0;
  for (;;) {
    Rational w = labeling_weight(csp, ell);
    if (w > 0) {
      out.support.push_back(ell);
      out.codes.push_back(encode_labeling(ell, L));
      out.prob.push_back(w);
      z += w;
    }
    int v = 0;
    while (v < n && ell[v] == L - 1) ell[v++] = 0;
    if (v == n) break;
    ell[v]++;
  }
  if (z == 0) throw std::runtime_error("enumerate_distribution: no valid labelings");
  out.prob_d.resize(out.prob.size());
  for (std::size_t i = 0; i < out.prob.size(); ++i) {
    out.prob[i] /= z;
    out.prob_d[i] = static_cast<double>(out.prob[i]);
  }
  return out;
}

int EnumeratedDistribution::index_of(const Labeling& ell) const {
  // support is in increasing code order, which (vertex 0 least significant)
  // is lexicographic order read from the last vertex.
  auto it = std::lower_bound(support.begin(), support.end(), ell,
                             [](const Labeling& a, const Labeling& b) {
                               return std::lexicographical_compare(
                                   a.rbegin(), a.rend(), b.rbegin(), b.rend());
                             });
  if (it == support.end() || *it != ell) return -1;
  return static_cast<int>(it - support.begin());
}

double EnumeratedDistribution::prob_of(const Labeling& ell) const {
  int i = index_of(ell);
  return i < 0 ? 0.0 : prob_d[i];
}

int constraint_diameter_check(const CspInstance& csp, const Graph& g) {
  int worst = 0;
  for (int cid = 0; cid < csp.num_constraints(); ++cid) {
    int d = g.set_diameter(csp.constraint(cid).members);
    if (d < 0 || d > csp.k())
      throw std::runtime_error("constraint " + std::to_string(cid) +
                               " has diameter " + std::to_string(d) +
                               " exceeding k=" + std::to_string(csp.k()));
    worst = std::max(worst, d);
  }
  return worst;
}

bool single_site_connected(const CspInstance& csp) {
  EnumeratedDistribution pi = enumerate_distribution(csp);
  const int n = csp.num_vertices();
  const int L = csp.num_labels();
  if (pi.support.empty()) return false;
  std::vector<char> seen(pi.support.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    Labeling cur = pi.support[q.front()];
    q.pop();
    for (int v = 0; v < n; ++v) {
      std::uint8_t keep = cur[v];
      for (int l = 0; l < L; ++l) {
        if (l == keep) continue;
        cur[v] = static_cast<std::uint8_t>(l);
        int j = pi.index_of(cur);
        if (j >= 0 && !seen[j]) {
          seen[j] = 1;
          ++reached;
          q.push(j);
        }
      }
      cur[v] = keep;
    }
  }
  return reached == pi.support.size();
}

namespace {

Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number_float()) {
    // Exact conversion of the double value.
    double d = j.get<double>();
    Rational r;
    int exp = 0;
    double m = std::frexp(d, &exp);
    boost::multiprecision::cpp_int num = static_cast<long long>(std::ldexp(m, 53));
    exp -= 53;
    r = num;
    if (exp > 0)
      r *= Rational(boost::multiprecision::cpp_int(1) << exp);
    else if (exp < 0)
      r /= Rational(boost::multiprecision::cpp_int(1) << -exp);
    return r;
  }
  throw std::invalid_argument("csp json: weights must be numbers or strings");
}

}  // namespace

CspInstance load_csp_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
  std::vector<std::vector<Rational>> unary;
  for (const auto& row : j.at("unary")) {
    std::vector<Rational> u;
    for (const auto& x : row) u.push_back(rational_from_json(x));
    unary.push_back(std::move(u));
  }
  std::vector<Constraint> cons;
  for (const auto& cj : j.at("constraints")) {
    Constraint c;
    c.members = cj.at("members").get<std::vector<int>>();
    for (const auto& x : cj.at("table")) c.table.push_back(rational_from_json(x));
    c.max_value = *std::max_element(c.table.begin(), c.table.end());
    if (cj.contains("hub")) c.hub = cj.at("hub").get<int>();
    cons.push_back(std::move(c));
  }
  int k = j.at("k").get<int>();
  return CspInstance(std::move(labels), std::move(unary), std::move(cons), k);
}

std::string save_csp_json(const CspInstance& csp) {
  nlohmann::ordered_json j;
  j["labels"] = csp.label_names();
  auto rat_str = [](const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
  };
  nlohmann::ordered_json unary = nlohmann::ordered_json::array();
  for (int v = 0; v < csp.num_vertices(); ++v) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int l = 0; l < csp.num_labels(); ++l) row.push_back(rat_str(csp.unary(v, l)));
    unary.push_back(row);
  }
  j["unary"] = unary;
  nlohmann::ordered_json cons = nlohmann::ordered_json::array();
  for (const Constraint& c : csp.constraints()) {
    nlohmann::ordered_json cj;
    cj["members"] = c.members;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const Rational& x : c.table) table.push_back(rat_str(x));
    cj["table"] = table;
    cj["hub"] = c.hub;
    cons.push_back(cj);
  }
  j["constraints"] = cons;
  j["k"] = csp.k();
  return j.dump(2);
}

}  // namespace exsamp
