#include "facebn/classifier.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"

namespace facebn {

namespace {

std::size_t su(int v) { return static_cast<std::size_t>(v); }

}  // namespace

bool is_fan(Variant v) { return v == Variant::GFAN || v == Variant::FAN_PER_CLASS; }

bool is_per_class(Variant v) {
  return v == Variant::TAN_PER_CLASS || v == Variant::FAN_PER_CLASS;
}

std::string variant_token(Variant v) {
  switch (v) {
    case Variant::NB: return "nb";
    case Variant::GTAN: return "gtan";
    case Variant::GFAN: return "gfan";
    case Variant::TAN_PER_CLASS: return "tan";
    case Variant::FAN_PER_CLASS: return "fan";
  }
  throw ConfigError("unknown classifier variant");
}

Variant parse_variant(const std::string& token) {
  if (token == "nb") return Variant::NB;
  if (token == "gtan") return Variant::GTAN;
  if (token == "gfan") return Variant::GFAN;
  if (token == "tan") return Variant::TAN_PER_CLASS;
  if (token == "fan") return Variant::FAN_PER_CLASS;
  throw ConfigError("unknown classifier kind '" + token + "', expected nb|gtan|gfan|tan|fan");
}

void ClassifierKind::validate() const {
  if (is_fan(variant) != threshold.has_value())
    throw ConfigError(is_fan(variant) ? "FAN classifier needs a threshold"
                                      : "threshold given for a non-FAN classifier");
  if (threshold && !threshold->average && std::isnan(threshold->fixed))
    throw ConfigError("FAN threshold must not be NaN");
}

FanThreshold parse_fan_threshold(const std::string& text) {
  if (text == "avg") return FanThreshold::avg();
  double s;
  try {
    s = parse_double(text);
  } catch (const Error&) {
    throw ConfigError("threshold '" + text + "' is neither 'avg' nor a number");
  }
  if (std::isnan(s)) throw ConfigError("FAN threshold must not be NaN");
  return FanThreshold::at(s);
}

std::string format_fan_threshold(const FanThreshold& t) {
  return t.average ? "avg" : format_double(t.fixed);
}

namespace {

// Per-class Laplace CPTs under a per-class structure. The conditionals fix
// this net's class, so the columns coincide with the global Laplace columns
// for that class.
ClassNet build_class_net(const CountTables& counts, int c, Structure structure) {
  const auto& space = counts.space;
  const int n = space.n();
  ClassNet net;
  net.cpt.resize(su(n));
  for (int i = 0; i < n; ++i) {
    const int vi = space.cardinalities[su(i)];
    const int p = structure.parent[su(i)];
    if (p < 0) {
      net.cpt[su(i)].resize(su(vi));
      for (int v = 0; v < vi; ++v)
        net.cpt[su(i)][su(v)] = static_cast<double>(counts.n_ca(c, i, v) + 1) /
                                static_cast<double>(counts.n_c(c) + vi);
    } else {
      const int vp = space.cardinalities[su(p)];
      net.cpt[su(i)].resize(su(vi) * su(vp));
      for (int pv = 0; pv < vp; ++pv)
        for (int v = 0; v < vi; ++v)
          net.cpt[su(i)][su(v) * su(vp) + su(pv)] =
              static_cast<double>(counts.n_cab(c, i, v, p, pv) + 1) /
              static_cast<double>(counts.n_ca(c, p, pv) + vi);
    }
  }
  net.structure = std::move(structure);
  return net;
}

}  // namespace

TrainedClassifier train(const ClassifierKind& kind, const Dataset& data,
                        const AttributeSpace& space) {
  kind.validate();
  space.validate();
  auto start = std::chrono::steady_clock::now();

  CountTables counts = count_tables(data, space);
  for (int c = 0; c < space.class_count; ++c)
    if (counts.n_c(c) == 0)
      throw DataError("class " + std::to_string(c) + " has no training instances");

  TrainedClassifier clf;
  clf.kind = kind;
  clf.space = space;
  clf.info.instances = counts.total;

  switch (kind.variant) {
    case Variant::NB:
      clf.bn = laplace_model(counts, Structure::naive(space.n()));
      break;
    case Variant::GTAN: {
      clf.bn = laplace_model(counts, chow_liu_tan(cmi_matrix(counts), class_mi_scores(counts)));
      break;
    }
    case Variant::GFAN: {
      clf.bn = laplace_model(
          counts, fan_structure(cmi_matrix(counts), class_mi_scores(counts), *kind.threshold));
      break;
    }
    case Variant::TAN_PER_CLASS:
    case Variant::FAN_PER_CLASS: {
      // Edge weights come from each class's own instances; the root score
      // I(A_i; C) needs class variation, so it is computed on the pooled data.
      std::vector<double> roots = class_mi_scores(counts);
      MultiNetModel m;
      m.space = space;
      m.class_prior = laplace_class_prior(counts);
      m.nets.reserve(su(space.class_count));
      for (int c = 0; c < space.class_count; ++c) {
        CmiMatrix within = within_class_mi_matrix(counts, c);
        Structure s = kind.variant == Variant::TAN_PER_CLASS
                          ? chow_liu_tan(within, roots)
                          : fan_structure(within, roots, *kind.threshold);
        m.nets.push_back(build_class_net(counts, c, std::move(s)));
      }
      clf.multinet = std::move(m);
      break;
    }
  }

  clf.info.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return clf;
}

std::pair<int, std::vector<double>> classify(const TrainedClassifier& clf,
                                             const std::vector<int>& a) {
  std::vector<double> post = clf.bn ? posterior(*clf.bn, a) : multinet_posterior(*clf.multinet, a);
  int decision = map_decision(post);
  return {decision, std::move(post)};
}

std::vector<std::pair<int, std::vector<double>>> predict_batch(
    const TrainedClassifier& clf, const std::vector<std::vector<int>>& instances) {
  std::vector<std::pair<int, std::vector<double>>> out;
  out.reserve(instances.size());
  for (const auto& a : instances) out.push_back(classify(clf, a));
  return out;
}

std::string network_label(const ClassifierKind& kind) {
  switch (kind.variant) {
    case Variant::NB: return "NB";
    case Variant::GTAN:
    case Variant::TAN_PER_CLASS: return "TAN";
    case Variant::GFAN:
    case Variant::FAN_PER_CLASS: return "FAN";
  }
  throw ConfigError("unknown classifier variant");
}

std::string structure_label(const ClassifierKind& kind) {
  switch (kind.variant) {
    case Variant::NB: return "naive";
    case Variant::GTAN:
    case Variant::GFAN: return "global";
    case Variant::TAN_PER_CLASS:
    case Variant::FAN_PER_CLASS: return "per-class";
  }
  throw ConfigError("unknown classifier variant");
}

std::vector<std::string> structure_summary(const TrainedClassifier& clf) {
  std::vector<std::string> lines;
  if (clf.bn) {
    lines = structure_lines(clf.bn->structure);
  } else {
    for (std::size_t c = 0; c < clf.multinet->nets.size(); ++c)
      for (const auto& line : structure_lines(clf.multinet->nets[c].structure))
        lines.push_back("class " + std::to_string(c) + ": " + line);
  }
  return lines;
}

// --- Serialization ----------------------------------------------------------

namespace {

constexpr const char* kModelMagic = "facebn model v1";

void write_vector(std::ostringstream& out, const char* name, const std::vector<double>& v) {
  out << name;
  for (double x : v) out << ' ' << format_double(x);
  out << '\n';
}

void write_structure(std::ostringstream& out, const Structure& s) {
  out << "structure";
  for (int p : s.parent) out << ' ' << p;
  out << '\n';
}

struct LineReader {
  std::vector<std::string> lines;
  std::size_t next = 0;

  std::vector<std::string> expect(const std::string& head) {
    if (next >= lines.size())
      throw FormatError("model file truncated, expected '" + head + "' line");
    std::vector<std::string> fields = split_whitespace(lines[next]);
    if (fields.empty() || fields.front() != head)
      throw FormatError("model file line " + std::to_string(next + 1) + ": expected '" + head +
                        "', got '" + lines[next] + "'");
    ++next;
    fields.erase(fields.begin());
    return fields;
  }
};

std::vector<double> parse_doubles(const std::vector<std::string>& fields) {
  std::vector<double> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(parse_double(f));
  return out;
}

Structure parse_structure(const std::vector<std::string>& fields, int n) {
  if (static_cast<int>(fields.size()) != n)
    throw FormatError("structure line has " + std::to_string(fields.size()) +
                      " entries, expected " + std::to_string(n));
  Structure s;
  s.parent.reserve(fields.size());
  for (const auto& f : fields) s.parent.push_back(parse_int(f));
  s.validate(n);
  return s;
}

std::vector<double> parse_cpt_line(LineReader& in, int attr, std::size_t expected) {
  std::vector<std::string> fields = in.expect("cpt");
  if (fields.empty() || parse_int(fields.front()) != attr)
    throw FormatError("cpt line out of order, expected attribute " + std::to_string(attr));
  fields.erase(fields.begin());
  if (fields.size() != expected)
    throw FormatError("cpt for attribute " + std::to_string(attr) + " has " +
                      std::to_string(fields.size()) + " entries, expected " +
                      std::to_string(expected));
  return parse_doubles(fields);
}

std::size_t cpt_size(const AttributeSpace& space, const Structure& s, int i, bool with_class) {
  std::size_t sz = su(space.cardinalities[su(i)]);
  int p = s.parent[su(i)];
  if (p >= 0) sz *= su(space.cardinalities[su(p)]);
  if (with_class) sz *= su(space.class_count);
  return sz;
}

}  // namespace

void save_classifier(const TrainedClassifier& clf, const std::string& path) {
  std::ostringstream out;
  out << kModelMagic << '\n';
  out << "kind " << variant_token(clf.kind.variant);
  if (clf.kind.threshold) out << ' ' << format_fan_threshold(*clf.kind.threshold);
  out << '\n';
  out << "attributes " << clf.space.n() << '\n';
  out << "cardinalities";
  for (int v : clf.space.cardinalities) out << ' ' << v;
  out << '\n';
  out << "classes " << clf.space.class_count << '\n';
  out << "instances " << clf.info.instances << '\n';
  out << "seed " << clf.info.seed << '\n';

  if (clf.bn) {
    write_structure(out, clf.bn->structure);
    write_vector(out, "prior", clf.bn->class_prior);
    for (int i = 0; i < clf.space.n(); ++i) {
      out << "cpt " << i;
      for (double x : clf.bn->cpt[su(i)]) out << ' ' << format_double(x);
      out << '\n';
    }
  } else {
    write_vector(out, "prior", clf.multinet->class_prior);
    for (int c = 0; c < clf.space.class_count; ++c) {
      const ClassNet& net = clf.multinet->nets[su(c)];
      out << "net " << c << '\n';
      write_structure(out, net.structure);
      for (int i = 0; i < clf.space.n(); ++i) {
        out << "cpt " << i;
        for (double x : net.cpt[su(i)]) out << ' ' << format_double(x);
        out << '\n';
      }
    }
  }
  write_text_file(path, out.str());
}

TrainedClassifier load_classifier(const std::string& path) {
  LineReader in;
  for (const auto& line : split(read_text_file(path), '\n'))
    if (!trim(line).empty()) in.lines.push_back(line);
  if (in.lines.empty() || in.lines.front() != kModelMagic)
    throw FormatError(path + ": not a classifier model file");
  in.next = 1;

  TrainedClassifier clf;
  std::vector<std::string> kind_fields = in.expect("kind");
  if (kind_fields.empty()) throw FormatError("kind line is empty");
  try {
    clf.kind.variant = parse_variant(kind_fields[0]);
    if (is_fan(clf.kind.variant)) {
      if (kind_fields.size() != 2) throw FormatError("FAN kind line needs a threshold");
      clf.kind.threshold = parse_fan_threshold(kind_fields[1]);
    } else if (kind_fields.size() != 1) {
      throw FormatError("unexpected threshold on a non-FAN kind line");
    }
  } catch (const ConfigError& e) {
    // A bad token inside a model file is file corruption, not configuration.
    throw FormatError(path + ": " + e.what());
  }

  int n = parse_int(in.expect("attributes").at(0));
  std::vector<std::string> card_fields = in.expect("cardinalities");
  if (static_cast<int>(card_fields.size()) != n)
    throw FormatError("cardinalities line does not match attribute count");
  for (const auto& f : card_fields) clf.space.cardinalities.push_back(parse_int(f));
  clf.space.class_count = parse_int(in.expect("classes").at(0));
  clf.space.validate();
  clf.info.instances = parse_int(in.expect("instances").at(0));
  clf.info.seed = static_cast<std::uint64_t>(parse_int(in.expect("seed").at(0)));

  const int C = clf.space.class_count;
  if (!is_per_class(clf.kind.variant)) {
    BnModel m;
    m.space = clf.space;
    m.structure = parse_structure(in.expect("structure"), n);
    m.class_prior = parse_doubles(in.expect("prior"));
    m.cpt.resize(su(n));
    for (int i = 0; i < n; ++i)
      m.cpt[su(i)] = parse_cpt_line(in, i, cpt_size(clf.space, m.structure, i, true));
    m.validate();
    clf.bn = std::move(m);
  } else {
    MultiNetModel m;
    m.space = clf.space;
    m.class_prior = parse_doubles(in.expect("prior"));
    if (static_cast<int>(m.class_prior.size()) != C)
      throw FormatError("prior line does not match class count");
    for (int c = 0; c < C; ++c) {
      if (parse_int(in.expect("net").at(0)) != c)
        throw FormatError("class networks out of order at class " + std::to_string(c));
      ClassNet net;
      net.structure = parse_structure(in.expect("structure"), n);
      net.cpt.resize(su(n));
      for (int i = 0; i < n; ++i)
        net.cpt[su(i)] = parse_cpt_line(in, i, cpt_size(clf.space, net.structure, i, false));
      m.nets.push_back(std::move(net));
    }
    clf.multinet = std::move(m);
  }
  if (in.next != in.lines.size()) throw FormatError(path + ": trailing content in model file");
  return clf;
}

}  // namespace facebn
