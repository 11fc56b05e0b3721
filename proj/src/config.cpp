#include "svarwb/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <sstream>

#include "svarwb/csv.hpp"
#include "svarwb/errors.hpp"

namespace svarwb {

namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::ConfigError, (where.empty() ? std::string("/") : where) + ": " + what);
}

// A json node together with its pointer, so every error names its field.
struct Node {
  const json& j;
  std::string path;

  bool has(const char* key) const { return j.is_object() && j.contains(key); }
  Node at(const char* key) const {
    if (!has(key)) config_error(path, std::string("missing field '") + key + "'");
    return {j.at(key), path + "/" + key};
  }
  Node at(std::size_t i) const { return {j.at(i), path + "/" + std::to_string(i)}; }
  std::size_t size() const { return j.size(); }

  const Node& object() const {
    if (!j.is_object()) config_error(path, "expected an object");
    return *this;
  }
  const Node& array() const {
    if (!j.is_array()) config_error(path, "expected an array");
    return *this;
  }
  long long integer() const {
    if (!j.is_number_integer()) config_error(path, "expected an integer");
    return j.get<long long>();
  }
  int index(int upper) const {  // 1-based in the file, 0-based in the result
    const long long v = integer();
    if (v < 1 || v > upper)
      config_error(path, "index " + std::to_string(v) + " outside 1.." + std::to_string(upper));
    return static_cast<int>(v - 1);
  }
  int count(int lower) const {
    const long long v = integer();
    if (v < lower) config_error(path, "must be at least " + std::to_string(lower));
    return static_cast<int>(v);
  }
  double number() const {
    if (!j.is_number()) config_error(path, "expected a number");
    return j.get<double>();
  }
  bool boolean() const {
    if (!j.is_boolean()) config_error(path, "expected true or false");
    return j.get<bool>();
  }
  std::string string() const {
    if (!j.is_string()) config_error(path, "expected a string");
    return j.get<std::string>();
  }
  std::string choice(std::initializer_list<const char*> allowed) const {
    const std::string v = string();
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    config_error(path, "'" + v + "' is not one of " + list);
  }
  void only(std::initializer_list<const char*> keys) const {
    object();
    for (auto it = j.begin(); it != j.end(); ++it)
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
        config_error(path, "unknown field '" + it.key() + "'");
  }
};

Vector vector_of(const Node& node, int size) {
  node.array();
  if (static_cast<int>(node.size()) != size)
    config_error(node.path, "expected " + std::to_string(size) + " entries");
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = node.at(static_cast<std::size_t>(i)).number();
  return v;
}

Matrix matrix_of(const Node& node, int rows, int cols) {
  node.array();
  if (static_cast<int>(node.size()) != rows) config_error(node.path, "expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) m.row(i) = vector_of(node.at(static_cast<std::size_t>(i)), cols).transpose();
  return m;
}

struct Context {
  int n = 0, s = 1;
};

TransformBlock block_of(const Node& node, const std::string& kind) {
  if (kind == "a0") return {TransformKind::A0Transpose, 0};
  if (kind == "long_run") return {TransformKind::LongRunCumulative, 0};
  return {TransformKind::ImpulseResponse, node.at("horizon").count(0)};
}

// Cell with the regime taken from `regime` when the node has none.
Cell cell_of(const Node& node, const Context& c, int regime = -1) {
  node.object();
  const std::string kind = node.at("kind").choice({"a0", "ir", "long_run"});
  int p = regime;
  if (node.has("regime")) p = node.at("regime").index(c.s);
  else if (regime < 0) {
    if (c.s > 1) config_error(node.path, "missing field 'regime'");
    p = 0;
  }
  if (kind == "a0") {
    node.only({"kind", "regime", "equation", "variable"});
    return a0_cell(p, node.at("equation").index(c.n), node.at("variable").index(c.n));
  }
  if (kind == "ir") {
    node.only({"kind", "regime", "horizon", "variable", "shock"});
    return ir_cell(p, node.at("horizon").count(0), node.at("variable").index(c.n), node.at("shock").index(c.n));
  }
  node.only({"kind", "regime", "variable", "shock"});
  return long_run_cell(p, node.at("variable").index(c.n), node.at("shock").index(c.n));
}

std::string label_of(const Node& node) { return node.has("label") ? node.at("label").string() : std::string(); }

EqualityRestriction equality_of(const Node& node, const Context& c) {
  const std::string type = node.object().at("type").choice({"zero", "equal_across", "linear"});
  if (type == "zero") {
    node.only({"type", "cell", "label"});
    return EqualityRestriction::zero(cell_of(node.at("cell"), c), label_of(node));
  }
  if (type == "equal_across") {
    node.only({"type", "cell", "regimes", "label"});
    const Node regs = node.at("regimes").array();
    if (regs.size() != 2) config_error(regs.path, "expected two regimes");
    const int a = regs.at(std::size_t{0}).index(c.s), b = regs.at(std::size_t{1}).index(c.s);
    if (a == b) config_error(regs.path, "regimes must differ");
    return EqualityRestriction::equal_across(cell_of(node.at("cell"), c, a), a, b, label_of(node));
  }
  node.only({"type", "terms", "label"});
  EqualityRestriction r;
  r.label = label_of(node);
  const Node terms = node.at("terms").array();
  if (terms.size() == 0) config_error(terms.path, "needs at least one term");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Node t = terms.at(i);
    t.only({"cell", "coefficient"});
    r.terms.push_back({cell_of(t.at("cell"), c), t.has("coefficient") ? t.at("coefficient").number() : 1.0});
  }
  return r;
}

InequalityRestriction inequality_of(const Node& node, const Context& c) {
  const std::string type = node.object().at("type").choice({"sign", "ranking"});
  if (type == "sign") {
    node.only({"type", "cell", "positive", "label"});
    return InequalityRestriction::sign(cell_of(node.at("cell"), c), node.at("positive").boolean(), label_of(node));
  }
  node.only({"type", "larger", "smaller", "label"});
  return InequalityRestriction::ranking(cell_of(node.at("larger"), c), cell_of(node.at("smaller"), c),
                                        label_of(node));
}

std::vector<double> weights_of(const Node& node, int s) {
  const Vector v = vector_of(node, s);
  return {v.data(), v.data() + v.size()};
}

FevRestriction fev_of(const Node& node, const Context& c) {
  node.only({"variable", "shock", "horizon", "weights", "other_shock", "other_weights", "lower", "upper", "label"});
  FevRestriction f;
  f.variable = node.at("variable").index(c.n);
  f.shock = node.at("shock").index(c.n);
  f.horizon = node.at("horizon").count(0);
  f.weights = node.has("weights") ? weights_of(node.at("weights"), c.s) : std::vector<double>(c.s, 1.0 / c.s);
  if (node.has("other_shock")) {
    f.other_shock = node.at("other_shock").index(c.n);
    f.other_weights = node.has("other_weights") ? weights_of(node.at("other_weights"), c.s)
                                                : std::vector<double>(c.s, 1.0 / c.s);
  }
  if (node.has("lower")) f.lower = node.at("lower").number();
  if (node.has("upper")) f.upper = node.at("upper").number();
  if (f.lower > f.upper) config_error(node.path, "lower bound exceeds upper bound");
  f.label = label_of(node);
  return f;
}

// Blocks used by the declared cells: A0 first, then responses by horizon, then the long run.
TransformSpec infer_transform(const RestrictionSet& rs) {
  std::vector<TransformBlock> blocks;
  auto add = [&](const TransformBlock& b) {
    if (std::find(blocks.begin(), blocks.end(), b) == blocks.end()) blocks.push_back(b);
  };
  for (const auto& e : rs.equalities)
    for (const auto& t : e.terms) add(t.cell.target);
  for (const auto& e : rs.inequalities)
    for (const auto& t : e.terms) add(t.cell.target);
  if (blocks.empty()) blocks.push_back({TransformKind::A0Transpose, 0});
  auto rank = [](const TransformBlock& b) {
    switch (b.kind) {
      case TransformKind::A0Transpose: return -1;
      case TransformKind::ImpulseResponse: return b.horizon;
      case TransformKind::LongRunCumulative: break;
    }
    return std::numeric_limits<int>::max();
  };
  std::stable_sort(blocks.begin(), blocks.end(),
                   [&](const TransformBlock& a, const TransformBlock& b) { return rank(a) < rank(b); });
  return TransformSpec(std::move(blocks));
}

void parse_restrictions(const Node& node, const Context& c, RunConfig& cfg) {
  node.only({"normalization", "equalities", "inequalities", "fev", "transform"});
  RestrictionSet& rs = cfg.restrictions;
  if (node.has("normalization"))
    rs.normalization = node.at("normalization").choice({"a0_diagonal_positive", "none"}) == "none"
                           ? Normalization::None
                           : Normalization::A0DiagonalPositive;
  if (node.has("equalities")) {
    const Node list = node.at("equalities").array();
    for (std::size_t i = 0; i < list.size(); ++i) rs.equalities.push_back(equality_of(list.at(i), c));
  }
  if (node.has("inequalities")) {
    const Node list = node.at("inequalities").array();
    for (std::size_t i = 0; i < list.size(); ++i) rs.inequalities.push_back(inequality_of(list.at(i), c));
  }
  if (node.has("fev")) {
    const Node list = node.at("fev").array();
    for (std::size_t i = 0; i < list.size(); ++i) rs.fev.push_back(fev_of(list.at(i), c));
  }
  if (node.has("transform")) {
    const Node list = node.at("transform").array();
    std::vector<TransformBlock> blocks;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node b = list.at(i);
      b.only({"kind", "horizon"});
      blocks.push_back(block_of(b, b.at("kind").choice({"a0", "ir", "long_run"})));
    }
    cfg.transform = TransformSpec(std::move(blocks));
  } else {
    cfg.transform = infer_transform(rs);
  }
}

// Row numbers in the file count observations from 1.
std::vector<int> break_rows_of(const Node& node, int s, std::vector<std::string>* dates) {
  node.array();
  if (static_cast<int>(node.size()) != s - 1)
    config_error(node.path, "expected " + std::to_string(s - 1) + " break dates for " + std::to_string(s) + " regimes");
  std::vector<int> rows;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Node b = node.at(i);
    if (b.j.is_string() && dates) {
      dates->push_back(b.string());
    } else {
      const int row = b.count(2) - 1;
      if (!rows.empty() && row <= rows.back()) config_error(b.path, "break dates must increase");
      rows.push_back(row);
    }
  }
  if (dates && !dates->empty() && !rows.empty()) config_error(node.path, "mix of dates and row numbers");
  return rows;
}

void parse_data(const Node& node, const RunConfig& cfg, DataSpec& d) {
  node.only({"path", "columns", "date_column", "breaks"});
  d.path = node.at("path").string();
  if (d.path.is_relative()) d.path = cfg.base_dir / d.path;
  if (node.has("columns")) {
    const Node cols = node.at("columns").array();
    if (static_cast<int>(cols.size()) != cfg.n)
      config_error(cols.path, "expected " + std::to_string(cfg.n) + " column names");
    for (std::size_t i = 0; i < cols.size(); ++i) d.columns.push_back(cols.at(i).string());
  }
  if (node.has("date_column")) d.date_column = node.at("date_column").string();
  if (node.has("breaks")) {
    d.break_rows = break_rows_of(node.at("breaks"), cfg.s, &d.break_dates);
    if (!d.break_dates.empty() && d.date_column.empty())
      config_error(node.path + "/breaks", "date breaks need a date_column");
  } else if (cfg.s > 1) {
    config_error(node.path, "missing field 'breaks'");
  }
}

void parse_dgp(const Node& node, const RunConfig& cfg, DgpSpec& d) {
  node.only({"T", "burn_in", "breaks", "variables", "regimes"});
  d.T = node.at("T").count(1);
  d.burn_in = node.has("burn_in") ? node.at("burn_in").count(0) : 0;
  d.break_rows = cfg.s > 1 ? break_rows_of(node.at("breaks"), cfg.s, nullptr) : std::vector<int>{};
  for (int b : d.break_rows)
    if (b >= d.T) config_error(node.path + "/breaks", "break outside the simulated sample");
  if (node.has("variables")) {
    const Node v = node.at("variables").array();
    if (static_cast<int>(v.size()) != cfg.n) config_error(v.path, "expected " + std::to_string(cfg.n) + " names");
    for (std::size_t i = 0; i < v.size(); ++i) d.names.push_back(v.at(i).string());
  } else {
    for (int i = 1; i <= cfg.n; ++i) d.names.push_back("y" + std::to_string(i));
  }
  const Node regs = node.at("regimes").array();
  if (static_cast<int>(regs.size()) != cfg.s) config_error(regs.path, "expected " + std::to_string(cfg.s) + " regimes");
  const int n = cfg.n, l = cfg.l;
  for (std::size_t p = 0; p < regs.size(); ++p) {
    const Node r = regs.at(p).object();
    try {
      if (r.has("a0")) {
        r.only({"a0", "a_plus"});
        StructuralRegime sr{matrix_of(r.at("a0"), n, n), matrix_of(r.at("a_plus"), n, n * l + 1)};
        d.regimes.push_back(structural_to_reduced({sr}, l).front());
      } else {
        r.only({"intercept", "lags", "sigma"});
        const Vector b = r.has("intercept") ? vector_of(r.at("intercept"), n) : Vector::Zero(n);
        const Node lags = r.at("lags").array();
        if (static_cast<int>(lags.size()) != l) config_error(lags.path, "expected " + std::to_string(l) + " lag matrices");
        std::vector<Matrix> bs;
        for (int i = 0; i < l; ++i) bs.push_back(matrix_of(lags.at(static_cast<std::size_t>(i)), n, n));
        d.regimes.emplace_back(b, std::move(bs), matrix_of(r.at("sigma"), n, n));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConfigError) throw;
      config_error(r.path, e.what());
    }
  }
}

TargetFunctional target_of(const Node& node, int n) {
  node.only({"kind", "variable", "shock"});
  TargetFunctional t;
  const std::string kind = node.at("kind").choice({"ir", "long_run", "fev"});
  t.kind = kind == "ir" ? TargetKind::ImpulseResponse
           : kind == "long_run" ? TargetKind::LongRunCumulative
                                : TargetKind::FevShare;
  t.variable = node.at("variable").index(n);
  t.shock = node.at("shock").index(n);
  return t;
}

void parse_inference(const Node& node, RunConfig& cfg) {
  node.only({"posterior_draws", "rotation_draws", "max_proposals", "mode", "prior", "target", "horizons",
             "max_horizon", "alpha", "projection"});
  InferenceOptions& o = cfg.inference;
  if (node.has("posterior_draws")) o.posterior_draws = node.at("posterior_draws").count(1);
  if (node.has("rotation_draws")) o.rotation_draws = node.at("rotation_draws").count(1);
  if (node.has("max_proposals")) o.max_proposals = node.at("max_proposals").count(0);
  if (node.has("mode")) {
    const std::string m = node.at("mode").choice({"auto", "locally_identified", "set_identified"});
    o.mode = m == "auto" ? InferenceMode::Auto
             : m == "locally_identified" ? InferenceMode::LocallyIdentified
                                         : InferenceMode::SetIdentified;
  }
  if (node.has("prior")) {
    const Node pr = node.at("prior");
    pr.only({"family", "coefficient_variance", "scale", "extra_dof"});
    if (pr.has("family"))
      o.prior.family = pr.at("family").choice({"diffuse", "conjugate"}) == "diffuse" ? PriorFamily::Diffuse
                                                                                      : PriorFamily::Conjugate;
    if (pr.has("coefficient_variance")) o.prior.coefficient_variance = pr.at("coefficient_variance").number();
    if (pr.has("scale")) o.prior.scale = pr.at("scale").number();
    if (pr.has("extra_dof")) o.prior.extra_dof = pr.at("extra_dof").count(1);
  }
  if (node.has("target")) o.target = target_of(node.at("target"), cfg.n);
  if (node.has("horizons") && node.has("max_horizon"))
    config_error(node.path, "give either 'horizons' or 'max_horizon'");
  if (node.has("horizons")) {
    const Node hs = node.at("horizons").array();
    o.horizons.clear();
    for (std::size_t i = 0; i < hs.size(); ++i) o.horizons.push_back(hs.at(i).count(0));
    if (o.horizons.empty()) config_error(hs.path, "needs at least one horizon");
  } else if (node.has("max_horizon")) {
    const int hmax = node.at("max_horizon").count(0);
    o.horizons.clear();
    for (int h = 0; h <= hmax; ++h) o.horizons.push_back(h);
  }
  if (node.has("alpha")) {
    cfg.alpha = node.at("alpha").number();
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) config_error(node.path + "/alpha", "must lie in (0, 1)");
  }
  if (node.has("projection"))
    cfg.projection = node.at("projection").choice({"switching_label", "fixed_label"}) == "fixed_label"
                         ? ProjectionMode::FixedLabel
                         : ProjectionMode::SwitchingLabel;
}

void parse_solver(const Node& node, RunConfig& cfg) {
  node.only({"route", "starts", "max_iterations", "tolerance", "dedup_tolerance"});
  if (node.has("route")) {
    const std::string r = node.at("route").choice({"auto", "general", "recursive", "sequential"});
    cfg.route = r == "auto" ? RoutePreference::Auto
                : r == "general" ? RoutePreference::General
                : r == "recursive" ? RoutePreference::Recursive
                                   : RoutePreference::Sequential;
  }
  if (node.has("starts")) cfg.solver.starts = node.at("starts").count(0);
  if (node.has("max_iterations")) cfg.solver.max_iterations = node.at("max_iterations").count(1);
  if (node.has("tolerance")) cfg.solver.tolerance = node.at("tolerance").number();
  if (node.has("dedup_tolerance")) cfg.solver.dedup_tolerance = node.at("dedup_tolerance").number();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ConfigError, std::string("syntax error: ") + e.what());
  }
  RunConfig cfg;
  cfg.text = text;
  cfg.base_dir = base_dir;
  const Node top{root, ""};
  top.only({"schema_version", "model", "restrictions", "data", "simulate", "identification", "solver", "inference",
            "seed", "threads", "output"});
  cfg.schema_version = static_cast<int>(top.at("schema_version").integer());
  if (cfg.schema_version != kSchemaVersion)
    config_error("/schema_version", "unsupported schema version " + std::to_string(cfg.schema_version));

  const Node model = top.at("model");
  model.only({"variables", "regimes", "lags"});
  cfg.n = model.at("variables").count(1);
  cfg.s = model.has("regimes") ? model.at("regimes").count(1) : 1;
  cfg.l = model.has("lags") ? model.at("lags").count(1) : 1;
  const Context c{cfg.n, cfg.s};

  if (top.has("restrictions")) parse_restrictions(top.at("restrictions"), c, cfg);
  else cfg.transform = infer_transform(cfg.restrictions);

  if (top.has("data")) {
    cfg.data.emplace();
    parse_data(top.at("data"), cfg, *cfg.data);
  }
  if (top.has("simulate")) {
    cfg.dgp.emplace();
    parse_dgp(top.at("simulate"), cfg, *cfg.dgp);
  }
  if (top.has("identification")) {
    const Node id = top.at("identification");
    id.only({"draws"});
    if (id.has("draws")) cfg.identification_draws = id.at("draws").count(1);
  }
  if (top.has("solver")) parse_solver(top.at("solver"), cfg);
  cfg.inference.horizons.clear();
  for (int h = 0; h <= 8; ++h) cfg.inference.horizons.push_back(h);
  if (top.has("inference")) parse_inference(top.at("inference"), cfg);
  if (top.has("seed")) {
    const long long seed = top.at("seed").integer();
    if (seed < 0) config_error("/seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
  }
  if (top.has("threads")) cfg.threads = top.at("threads").count(1);
  if (top.has("output")) {
    cfg.output = top.at("output").string();
    if (cfg.output.is_relative()) cfg.output = base_dir / cfg.output;
  }
  cfg.inference.seed = cfg.seed;
  cfg.inference.threads = cfg.threads;
  cfg.inference.route = cfg.route;
  cfg.inference.solver = cfg.solver;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base);
}

Dataset load_dataset(const DataSpec& spec) {
  const CsvTable table = read_csv(spec.path);
  Dataset d;
  int date_col = -1;
  if (!spec.date_column.empty()) {
    date_col = table.column(spec.date_column);
    if (date_col < 0) fail(ErrorCode::ConfigError, "/data/date_column: no column '" + spec.date_column + "'");
  }
  std::vector<int> cols;
  if (spec.columns.empty()) {
    for (int c = 0; c < static_cast<int>(table.header.size()); ++c)
      if (c != date_col) cols.push_back(c);
  } else {
    for (const auto& name : spec.columns) {
      const int c = table.column(name);
      if (c < 0) fail(ErrorCode::ConfigError, "/data/columns: no column '" + name + "'");
      cols.push_back(c);
    }
  }
  const int T = static_cast<int>(table.rows.size());
  d.y.resize(T, static_cast<Index>(cols.size()));
  for (int t = 0; t < T; ++t)
    for (std::size_t k = 0; k < cols.size(); ++k)
      d.y(t, static_cast<Index>(k)) = table.number(t, cols[k]);
  for (int c : cols) d.names.push_back(table.header[static_cast<std::size_t>(c)]);
  if (date_col >= 0)
    for (int t = 0; t < T; ++t) d.dates.push_back(table.rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(date_col)]);

  if (!spec.break_dates.empty()) {
    for (const auto& date : spec.break_dates) {
      const auto it = std::find(d.dates.begin(), d.dates.end(), date);
      if (it == d.dates.end()) fail(ErrorCode::ConfigError, "/data/breaks: date '" + date + "' not in the date column");
      const int row = static_cast<int>(it - d.dates.begin());
      if (!d.break_rows.empty() && row <= d.break_rows.back())
        fail(ErrorCode::ConfigError, "/data/breaks: break dates must increase");
      d.break_rows.push_back(row);
    }
  } else {
    d.break_rows = spec.break_rows;
  }
  for (int b : d.break_rows)
    if (b >= T) fail(ErrorCode::ConfigError, "/data/breaks: break row beyond the end of the data");
  return d;
}

}  // namespace svarwb
