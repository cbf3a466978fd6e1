#include "pplab/config.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <set>
#include <sstream>

#include "pplab/errors.hpp"

namespace pplab {

namespace {

using nlohmann::json;

// Character iterator that counts the newlines it has passed.
struct LineCountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  int* line = nullptr;

  reference operator*() const { return *p; }
  LineCountingIterator& operator++() {
    if (*p == '\n') ++*line;
    ++p;
    return *this;
  }
  LineCountingIterator operator++(int) {
    LineCountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const LineCountingIterator& o) const { return p == o.p; }
  bool operator!=(const LineCountingIterator& o) const { return p != o.p; }
};

// Records the source line of every object key, addressed by JSON pointer.
class KeyLineRecorder : public nlohmann::json_sax<json> {
 public:
  explicit KeyLineRecorder(const int* line) : line_(line) {}

  std::map<std::string, int> lines;

  bool null() override { return value(); }
  bool boolean(bool) override { return value(); }
  bool number_integer(number_integer_t) override { return value(); }
  bool number_unsigned(number_unsigned_t) override { return value(); }
  bool number_float(number_float_t, const string_t&) override { return value(); }
  bool string(string_t&) override { return value(); }
  bool binary(binary_t&) override { return value(); }
  bool start_object(std::size_t) override { return open(false); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_object() override { return close(); }
  bool end_array() override { return close(); }
  bool key(string_t& k) override {
    frames_.back().selector = escape(k);
    lines[path()] = *line_;
    return true;
  }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override { return false; }

 private:
  struct Frame {
    bool array = false;
    int index = -1;
    std::string selector;
  };

  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    return out;
  }

  std::string path() const {
    std::string s;
    for (const auto& f : frames_) s += "/" + f.selector;
    return s;
  }

  bool value() {
    if (!frames_.empty() && frames_.back().array) frames_.back().selector = std::to_string(++frames_.back().index);
    return true;
  }
  bool open(bool array) {
    value();
    if (!frames_.empty()) lines.emplace(path(), *line_);
    frames_.push_back({array, -1, ""});
    return true;
  }
  bool close() {
    frames_.pop_back();
    return true;
  }

  const int* line_;
  std::vector<Frame> frames_;
};

// Schema walker; every failure is reported with the line of the offending key.
class Reader {
 public:
  Reader(const json& root, std::map<std::string, int> lines) : root_(root), lines_(std::move(lines)) {}

  int line_of(const std::string& ptr) const {
    std::string p = ptr;
    while (true) {
      auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      const auto cut = p.rfind('/');
      if (cut == std::string::npos || p.empty()) return 1;
      p = p.substr(0, cut);
      if (p.empty()) return 1;
    }
  }

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    const int line = line_of(ptr);
    throw config_error("line " + std::to_string(line) + ": " + msg + " (at " + (ptr.empty() ? "/" : ptr) + ")", line);
  }

  const json& object(const json& j, const std::string& ptr, std::initializer_list<const char*> allowed) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!ok.count(it.key())) fail(ptr + "/" + it.key(), "unknown key '" + it.key() + "'");
    return j;
  }

  double number(const json& obj, const std::string& ptr, const char* key, double fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(ptr + "/" + key, std::string("'") + key + "' must be a number");
    return v.get<double>();
  }

  int integer(const json& obj, const std::string& ptr, const char* key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(ptr + "/" + key, std::string("'") + key + "' must be an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(ptr + "/" + key, std::string("'") + key + "' is out of range");
    return static_cast<int>(x);
  }

  std::string text(const json& obj, const std::string& ptr, const char* key, const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(ptr + "/" + key, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::string& ptr, const char* key) const {
    const json& v = obj.at(key);
    if (!v.is_array()) fail(ptr + "/" + key, std::string("'") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(ptr + "/" + key + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  const json& root() const { return root_; }

 private:
  const json& root_;
  std::map<std::string, int> lines_;
};

TimeFactor read_time_factor(const Reader& r, const json& j, const std::string& ptr) {
  r.object(j, ptr, {"kind", "c", "nu"});
  TimeFactor tf;
  try {
    tf.kind = time_factor_kind(r.text(j, ptr, "kind", "constant"));
  } catch (const std::exception& e) {
    r.fail(ptr + "/kind", e.what());
  }
  tf.c = r.number(j, ptr, "c", 0.0);
  tf.nu = r.number(j, ptr, "nu", 0.0);
  try {
    tf.validate();
  } catch (const std::exception& e) {
    r.fail(ptr, e.what());
  }
  return tf;
}

std::array<double, 3> read_vec3(const Reader& r, const json& j, const std::string& ptr, const char* key) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (!j.contains(key)) return out;
  const auto v = r.numbers(j, ptr, key);
  if (v.size() > 3) r.fail(ptr + "/" + key, std::string("'") + key + "' has more than 3 entries");
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

std::vector<double> read_range(const Reader& r, const json& j, const std::string& ptr) {
  if (j.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number()) r.fail(ptr + "/" + std::to_string(i), "expected a number");
      out.push_back(j[i].get<double>());
    }
    return out;
  }
  r.object(j, ptr, {"min", "max", "steps", "values"});
  if (j.contains("values")) {
    if (j.contains("min") || j.contains("max") || j.contains("steps"))
      r.fail(ptr, "give either 'values' or 'min'/'max'/'steps'");
    return r.numbers(j, ptr, "values");
  }
  const int steps = r.integer(j, ptr, "steps", 0);
  if (steps < 0) r.fail(ptr + "/steps", "'steps' must be nonnegative");
  const double lo = r.number(j, ptr, "min", 0.0);
  const double hi = r.number(j, ptr, "max", lo);
  if (steps > 0 && hi < lo) r.fail(ptr, "'max' is below 'min'");
  std::vector<double> out;
  for (int k = 0; k < steps; ++k) out.push_back(steps == 1 ? lo : lo + (hi - lo) * k / (steps - 1));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  int line = 1;
  KeyLineRecorder rec(&line);
  LineCountingIterator first{text.data(), &line}, last{text.data() + text.size(), &line};
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Locate the failing byte to anchor the message.
    const std::size_t at = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int l = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n'));
    throw config_error("line " + std::to_string(l) + ": malformed JSON: " + e.what(), l);
  }
  json::sax_parse(first, last, &rec);

  const Reader r(root, rec.lines);
  RunConfig cfg;
  r.object(root, "", {"problem", "solver", "outputs", "seed", "horizon", "scan"});

  if (root.contains("problem")) {
    const std::string pp = "/problem";
    const json& pj = r.object(root.at("problem"), pp, {"n", "L", "M", "potential", "convection", "initial"});
    const int n = r.integer(pj, pp, "n", cfg.grid.n);
    const double L = r.number(pj, pp, "L", cfg.grid.L);
    const int M = r.integer(pj, pp, "M", cfg.grid.M);
    try {
      cfg.grid = GridDomain(n, L, M);
    } catch (const std::exception& e) {
      r.fail(pp, e.what());
    }

    if (pj.contains("potential")) {
      const std::string ptr = pp + "/potential";
      const json& j = r.object(pj.at("potential"), ptr, {"sigma", "lambda", "R0", "mode", "sign"});
      PotentialSpec& p = cfg.potential;
      p.sigma = r.number(j, ptr, "sigma", 0.0);
      if (j.contains("lambda")) p.lambda = read_time_factor(r, j.at("lambda"), ptr + "/lambda");
      p.R0 = r.number(j, ptr, "R0", 0.0);
      try {
        p.mode = potential_mode(r.text(j, ptr, "mode", "exact_power"));
      } catch (const std::exception& e) {
        r.fail(ptr + "/mode", e.what());
      }
      p.sign = r.number(j, ptr, "sign", 1.0);
      try {
        p.validate();
      } catch (const std::exception& e) {
        r.fail(ptr, e.what());
      }
    }

    if (pj.contains("convection")) {
      const std::string ptr = pp + "/convection";
      const json& j = r.object(pj.at("convection"), ptr, {"lambda", "c", "g"});
      ConvectionSpec cs;
      if (j.contains("lambda")) cs.lambda_b = read_time_factor(r, j.at("lambda"), ptr + "/lambda");
      cs.c = read_vec3(r, j, ptr, "c");
      cs.g = read_vec3(r, j, ptr, "g");
      cfg.convection = cs;
    }

    if (pj.contains("initial")) {
      const std::string ptr = pp + "/initial";
      const json& j = r.object(pj.at("initial"), ptr, {"C0", "delta", "alpha", "d_pow"});
      InitialSpec& i = cfg.initial;
      i.C0 = r.number(j, ptr, "C0", 1.0);
      i.delta = r.number(j, ptr, "delta", 0.0);
      i.alpha = r.number(j, ptr, "alpha", 0.0);
      i.d_pow = r.number(j, ptr, "d_pow", 0.0);
      try {
        i.validate();
      } catch (const std::exception& e) {
        r.fail(ptr, e.what());
      }
    }
  }

  if (root.contains("solver")) {
    const std::string ptr = "/solver";
    const json& j = r.object(root.at("solver"), ptr, {"method", "max_terms", "tol", "rho", "quad_steps"});
    cfg.method = r.text(j, ptr, "method", cfg.method);
    if (cfg.method != "auto" && cfg.method != "autonomous" && cfg.method != "picard" && cfg.method != "convection")
      r.fail(ptr + "/method", "unknown method '" + cfg.method + "'");
    cfg.series.max_terms = r.integer(j, ptr, "max_terms", cfg.series.max_terms);
    cfg.series.tol = r.number(j, ptr, "tol", cfg.series.tol);
    cfg.series.rho = r.number(j, ptr, "rho", cfg.series.rho);
    cfg.series.quad_steps = r.integer(j, ptr, "quad_steps", cfg.series.quad_steps);
  }

  if (root.contains("outputs")) {
    const std::string ptr = "/outputs";
    const json& j = r.object(root.at("outputs"), ptr, {"directory", "formats", "time_grid"});
    cfg.out_dir = r.text(j, ptr, "directory", cfg.out_dir);
    if (j.contains("formats")) {
      const json& f = j.at("formats");
      if (!f.is_array()) r.fail(ptr + "/formats", "'formats' must be an array of strings");
      cfg.formats.clear();
      for (std::size_t k = 0; k < f.size(); ++k) {
        const std::string fp = ptr + "/formats/" + std::to_string(k);
        if (!f[k].is_string()) r.fail(fp, "expected a string");
        const std::string s = f[k].get<std::string>();
        if (s != "csv" && s != "binary") r.fail(fp, "unknown format '" + s + "'");
        cfg.formats.push_back(s);
      }
    }
    if (j.contains("time_grid")) cfg.series.time_grid = r.numbers(j, ptr, "time_grid");
  }

  try {
    cfg.series.validate();
  } catch (const std::exception& e) {
    r.fail("/solver", e.what());
  }
  for (std::size_t k = 0; k < cfg.series.time_grid.size(); ++k) {
    const double t = cfg.series.time_grid[k];
    if (!(t >= 0.0) || (k > 0 && t <= cfg.series.time_grid[k - 1]))
      r.fail("/outputs/time_grid", "time_grid must be nonnegative and strictly increasing");
  }
  if (cfg.series.time_grid.empty()) r.fail("/outputs/time_grid", "time_grid must not be empty");

  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      r.fail("/seed", "'seed' must be a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("horizon")) {
    const json& h = root.at("horizon");
    if (h.is_string() && (h.get<std::string>() == "inf" || h.get<std::string>() == "infinity"))
      cfg.horizon = std::numeric_limits<double>::infinity();
    else if (h.is_number() && h.get<double>() > 0.0)
      cfg.horizon = h.get<double>();
    else
      r.fail("/horizon", "'horizon' must be a positive number or \"inf\"");
  }

  if (root.contains("scan")) {
    const std::string ptr = "/scan";
    const json& j =
        r.object(root.at("scan"), ptr, {"sigma", "Lambda0", "lambda_family", "nu", "R0", "mode", "alpha", "delta"});
    ScanSpec s;
    if (j.contains("sigma")) s.sigma = read_range(r, j.at("sigma"), ptr + "/sigma");
    if (j.contains("Lambda0")) s.Lambda0 = read_range(r, j.at("Lambda0"), ptr + "/Lambda0");
    try {
      s.family = time_factor_kind(r.text(j, ptr, "lambda_family", "constant"));
      s.mode = potential_mode(r.text(j, ptr, "mode", "exact_power"));
    } catch (const std::exception& e) {
      r.fail(ptr, e.what());
    }
    s.nu = r.number(j, ptr, "nu", 0.0);
    s.R0 = r.number(j, ptr, "R0", 0.0);
    cfg.initial.alpha = r.number(j, ptr, "alpha", cfg.initial.alpha);
    cfg.initial.delta = r.number(j, ptr, "delta", cfg.initial.delta);
    for (double v : s.sigma)
      if (!(v >= 0.0)) r.fail(ptr + "/sigma", "sigma values must be nonnegative");
    cfg.scan = s;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open config file '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pplab
