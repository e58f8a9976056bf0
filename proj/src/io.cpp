#include "spaceform/io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace spaceform {

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& text) {
  double v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw ParseError("not a number: '" + text + "'");
  return v;
}

namespace {

struct Lines {
  std::string path;
  std::vector<std::string> raw;
  std::size_t next = 0;

  [[noreturn]] void fail(std::size_t lineno, const std::string& msg) const {
    throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
  }

  // Tokens of the next non-blank line, with its 1-based number.
  std::pair<std::vector<std::string>, std::size_t> line(const char* what) {
    while (next < raw.size()) {
      const std::size_t lineno = ++next;
      std::istringstream ss(raw[lineno - 1]);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(std::move(t));
      if (!tokens.empty()) return {std::move(tokens), lineno};
    }
    throw ParseError(path + ": unexpected end of file, expected " +
                     std::string(what));
  }
};

Lines read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  Lines lines;
  lines.path = path;
  for (std::string l; std::getline(in, l);) lines.raw.push_back(std::move(l));
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw DataError("failed writing " + path);
}

double token_double(const Lines& lines, std::size_t lineno,
                    const std::string& t) {
  double v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    lines.fail(lineno, "not a number: '" + t + "'");
  return v;
}

long token_long(const Lines& lines, std::size_t lineno,
                const std::string& t) {
  long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size())
    lines.fail(lineno, "not an integer: '" + t + "'");
  return v;
}

char kind_letter(Kind k) {
  switch (k) {
    case Kind::euclidean: return 'E';
    case Kind::spherical: return 'S';
    case Kind::hyperbolic: return 'H';
  }
  return '?';
}

void write_signature(std::string& out, const Signature& sig) {
  out += "blocks " + std::to_string(sig.size()) + "\n";
  for (std::size_t k = 0; k < sig.size(); ++k) {
    const auto& b = sig.blocks[k];
    out += std::string("block ") + kind_letter(b.kind) + " " +
           std::to_string(b.dim) + " " + format_double(b.curvature) + " " +
           format_double(sig.alphas(Index(k))) + "\n";
  }
}

Signature read_signature(Lines& lines) {
  auto [head, headno] = lines.line("blocks count");
  if (head.size() != 2 || head[0] != "blocks")
    lines.fail(headno, "expected 'blocks <count>'");
  const long count = token_long(lines, headno, head[1]);
  if (count < 1 || count > 1000)
    lines.fail(headno, "unreasonable block count");
  std::vector<SpaceForm> blocks;
  Vector alphas(count);
  for (long k = 0; k < count; ++k) {
    auto [tok, lineno] = lines.line("block line");
    if (tok.size() != 5 || tok[0] != "block" || tok[1].size() != 1)
      lines.fail(lineno, "expected 'block <E|S|H> <dim> <curvature> <alpha>'");
    Kind kind;
    switch (tok[1][0]) {
      case 'E': kind = Kind::euclidean; break;
      case 'S': kind = Kind::spherical; break;
      case 'H': kind = Kind::hyperbolic; break;
      default: lines.fail(lineno, "unknown block kind '" + tok[1] + "'");
    }
    blocks.push_back(SpaceForm{kind, int(token_long(lines, lineno, tok[2])),
                               token_double(lines, lineno, tok[3])});
    alphas(k) = token_double(lines, lineno, tok[4]);
  }
  try {
    return Signature(std::move(blocks), std::move(alphas));
  } catch (const std::exception& e) {
    lines.fail(lines.next, std::string("invalid signature: ") + e.what());
  }
}

void expect_header(Lines& lines, const char* magic) {
  auto [tok, lineno] = lines.line("file header");
  if (tok.size() != 2 || tok[0] != magic)
    lines.fail(lineno, std::string("expected '") + magic + " 1' header");
  if (tok[1] != "1")
    lines.fail(lineno, "unsupported format version " + tok[1]);
}

std::size_t hyperbolic_block_count(const Signature& sig) {
  std::size_t h = 0;
  for (const auto& b : sig.blocks)
    if (b.kind == Kind::hyperbolic) ++h;
  return h;
}

void write_radii(std::string& out, const std::vector<double>& radii) {
  if (radii.empty()) return;
  out += "radii " + std::to_string(radii.size());
  for (double r : radii) out += " " + format_double(r);
  out += "\n";
}

// Consumes an optional "radii" line; the following line is pushed back by
// peeking: we read tokens and rewind when the tag differs.
std::vector<double> maybe_read_radii(Lines& lines, const Signature& sig) {
  const std::size_t mark = lines.next;
  auto [tok, lineno] = lines.line("radii or next section");
  if (tok[0] != "radii") {
    lines.next = mark;
    return {};
  }
  if (tok.size() < 2) lines.fail(lineno, "expected 'radii <count> ...'");
  const long count = token_long(lines, lineno, tok[1]);
  if (count < 0 || std::size_t(tok.size()) != std::size_t(count) + 2)
    lines.fail(lineno, "radii count does not match the values given");
  if (std::size_t(count) != hyperbolic_block_count(sig))
    lines.fail(lineno, "need one radius per hyperbolic block");
  std::vector<double> radii;
  for (long i = 0; i < count; ++i)
    radii.push_back(token_double(lines, lineno, tok[std::size_t(i) + 2]));
  return radii;
}

// Rows of `width` numbers plus a trailing per-row extra column.
void read_rows(Lines& lines, Index rows, Index width, Matrix& m,
               const std::function<void(Index, const Lines&, std::size_t,
                                        const std::string&)>& extra) {
  m.resize(rows, width);
  for (Index i = 0; i < rows; ++i) {
    auto [tok, lineno] = lines.line("data row");
    if (Index(tok.size()) != width + 1)
      lines.fail(lineno, "row " + std::to_string(i) + ": expected " +
                             std::to_string(width + 1) + " fields, got " +
                             std::to_string(tok.size()));
    for (Index j = 0; j < width; ++j)
      m(i, j) = token_double(lines, lineno, tok[std::size_t(j)]);
    extra(i, lines, lineno, tok.back());
  }
}

}  // namespace

void save_dataset(const std::string& path, const LabeledData& data,
                  const std::vector<double>& radii) {
  data.validate();
  if (!radii.empty() && radii.size() != hyperbolic_block_count(data.sig))
    throw DimensionError("save_dataset: one radius per hyperbolic block");
  std::string out = "spaceform-dataset 1\n";
  write_signature(out, data.sig);
  write_radii(out, radii);
  out += "points " + std::to_string(data.size()) + "\n";
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.points.cols(); ++j) {
      out += format_double(data.points(i, j));
      out += ' ';
    }
    out += std::to_string(data.labels(i));
    out += '\n';
  }
  write_file(path, out);
}

DatasetFile load_dataset(const std::string& path) {
  Lines lines = read_file(path);
  expect_header(lines, "spaceform-dataset");
  DatasetFile file;
  file.data.sig = read_signature(lines);
  file.radii = maybe_read_radii(lines, file.data.sig);

  auto [tok, lineno] = lines.line("points count");
  if (tok.size() != 2 || tok[0] != "points")
    lines.fail(lineno, "expected 'points <count>'");
  const long n = token_long(lines, lineno, tok[1]);
  if (n < 0 || n > 100000000) lines.fail(lineno, "unreasonable point count");

  file.data.labels.resize(n);
  read_rows(lines, n, file.data.sig.ambient(), file.data.points,
            [&](Index i, const Lines& l, std::size_t ln,
                const std::string& t) {
              file.data.labels(i) = int(token_long(l, ln, t));
            });
  file.data.validate();
  return file;
}

void save_perceptron(const std::string& path, const PerceptronModel& model) {
  std::string out = "spaceform-perceptron 1\n";
  write_signature(out, model.sig);
  write_radii(out, model.radii);
  out += "converged " + std::to_string(model.converged ? 1 : 0) + "\n";
  out += "passes " + std::to_string(model.passes) + "\n";
  out += "updates " + std::to_string(model.updates.size()) + "\n";
  out += "support " + std::to_string(model.support.rows()) + "\n";
  for (Index i = 0; i < model.support.rows(); ++i) {
    for (Index j = 0; j < model.support.cols(); ++j) {
      out += format_double(model.support(i, j));
      out += ' ';
    }
    out += format_double(model.coefficients(i));
    out += '\n';
  }
  write_file(path, out);
}

PerceptronModel load_perceptron(const std::string& path) {
  Lines lines = read_file(path);
  expect_header(lines, "spaceform-perceptron");
  PerceptronModel model;
  model.sig = read_signature(lines);
  model.radii = maybe_read_radii(lines, model.sig);
  if (model.radii.size() != hyperbolic_block_count(model.sig))
    lines.fail(lines.next, "perceptron file is missing its radii line");

  const auto scalar = [&](const char* key) {
    auto [tok, lineno] = lines.line(key);
    if (tok.size() != 2 || tok[0] != key)
      lines.fail(lineno, std::string("expected '") + key + " <value>'");
    return token_long(lines, lineno, tok[1]);
  };
  model.converged = scalar("converged") != 0;
  model.passes = int(scalar("passes"));
  scalar("updates");  // informational count; the update log is not stored
  const long support = scalar("support");
  if (support < 0 || support > 100000000)
    lines.fail(lines.next, "unreasonable support count");
  model.coefficients.resize(support);
  read_rows(lines, support, model.sig.ambient(), model.support,
            [&](Index i, const Lines& l, std::size_t ln,
                const std::string& t) {
              model.coefficients(i) = token_double(l, ln, t);
            });
  return model;
}

void save_hyperbolic(const std::string& path, const SpaceForm& form,
                     const HyperbolicPerceptron& model) {
  if (form.kind != Kind::hyperbolic)
    throw ParameterError("save_hyperbolic: not a hyperbolic form");
  std::string out = "spaceform-hyperbolic 1\n";
  out += "form H " + std::to_string(form.dim) + " " +
         format_double(form.curvature) + "\n";
  out += "updates " + std::to_string(model.updates) + "\n";
  out += "passes " + std::to_string(model.passes) + "\n";
  out += "converged " + std::to_string(model.converged ? 1 : 0) + "\n";
  out += "w";
  for (Index i = 0; i < model.w.size(); ++i)
    out += " " + format_double(model.w(i));
  out += "\n";
  write_file(path, out);
}

HyperbolicModelFile load_hyperbolic(const std::string& path) {
  Lines lines = read_file(path);
  expect_header(lines, "spaceform-hyperbolic");
  HyperbolicModelFile file;
  {
    auto [tok, lineno] = lines.line("form");
    if (tok.size() != 4 || tok[0] != "form" || tok[1] != "H")
      lines.fail(lineno, "expected 'form H <dim> <curvature>'");
    file.form = SpaceForm{Kind::hyperbolic,
                          int(token_long(lines, lineno, tok[2])),
                          token_double(lines, lineno, tok[3])};
    file.form.validate();
  }
  for (const char* key : {"updates", "passes", "converged"}) {
    auto [tok, lineno] = lines.line(key);
    if (tok.size() != 2 || tok[0] != key)
      lines.fail(lineno, std::string("expected '") + key + " <value>'");
    const long v = token_long(lines, lineno, tok[1]);
    if (tok[0] == std::string("updates")) file.model.updates = v;
    else if (tok[0] == std::string("passes")) file.model.passes = int(v);
    else file.model.converged = v != 0;
  }
  auto [tok, lineno] = lines.line("w");
  if (tok.size() != std::size_t(file.form.ambient()) + 1 || tok[0] != "w")
    lines.fail(lineno, "expected 'w' plus " +
                           std::to_string(file.form.ambient()) + " numbers");
  file.model.w.resize(file.form.ambient());
  for (Index i = 0; i < file.model.w.size(); ++i)
    file.model.w(i) = token_double(lines, lineno, tok[std::size_t(i) + 1]);
  return file;
}

void save_svm_model(const std::string& path, const SvmModel& model) {
  std::string out = "spaceform-svm 1\n";
  write_signature(out, model.sig);
  write_radii(out, model.radii);
  out += "epsilon " + format_double(model.epsilon) + "\n";
  out += "support " + std::to_string(model.support.rows()) + "\n";
  for (Index i = 0; i < model.support.rows(); ++i) {
    for (Index j = 0; j < model.support.cols(); ++j) {
      out += format_double(model.support(i, j));
      out += ' ';
    }
    out += format_double(model.beta(i));
    out += '\n';
  }
  write_file(path, out);
}

SvmModel load_svm_model(const std::string& path) {
  Lines lines = read_file(path);
  expect_header(lines, "spaceform-svm");
  SvmModel model;
  model.sig = read_signature(lines);
  model.radii = maybe_read_radii(lines, model.sig);
  if (model.radii.size() != hyperbolic_block_count(model.sig))
    lines.fail(lines.next, "svm file is missing its radii line");
  {
    auto [tok, lineno] = lines.line("epsilon");
    if (tok.size() != 2 || tok[0] != "epsilon")
      lines.fail(lineno, "expected 'epsilon <value>'");
    model.epsilon = token_double(lines, lineno, tok[1]);
  }
  auto [tok, lineno] = lines.line("support");
  if (tok.size() != 2 || tok[0] != "support")
    lines.fail(lineno, "expected 'support <count>'");
  const long support = token_long(lines, lineno, tok[1]);
  if (support < 0 || support > 100000000)
    lines.fail(lineno, "unreasonable support count");
  model.beta.resize(support);
  read_rows(lines, support, model.sig.ambient(), model.support,
            [&](Index i, const Lines& l, std::size_t ln,
                const std::string& t) {
              model.beta(i) = token_double(l, ln, t);
            });
  return model;
}

void save_params(const std::string& path, const ClassifierParams& params) {
  if (params.weights.size() != params.sig.size())
    throw DimensionError("save_params: one weight block per signature block");
  std::string out = "spaceform-params 1\n";
  write_signature(out, params.sig);
  out += "bias " + format_double(params.bias) + "\n";
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    out += "w";
    for (Index i = 0; i < params.weights[k].size(); ++i)
      out += " " + format_double(params.weights[k](i));
    out += "\n";
  }
  write_file(path, out);
}

ClassifierParams load_params(const std::string& path) {
  Lines lines = read_file(path);
  expect_header(lines, "spaceform-params");
  ClassifierParams params;
  params.sig = read_signature(lines);
  {
    auto [tok, lineno] = lines.line("bias");
    if (tok.size() != 2 || tok[0] != "bias")
      lines.fail(lineno, "expected 'bias <value>'");
    params.bias = token_double(lines, lineno, tok[1]);
  }
  for (std::size_t k = 0; k < params.sig.size(); ++k) {
    const Index width = params.sig.blocks[k].ambient();
    auto [tok, lineno] = lines.line("w");
    if (tok.size() != std::size_t(width) + 1 || tok[0] != "w")
      lines.fail(lineno, "expected 'w' plus " + std::to_string(width) +
                             " numbers for block " + std::to_string(k));
    Vector w(width);
    for (Index i = 0; i < width; ++i)
      w(i) = token_double(lines, lineno, tok[std::size_t(i) + 1]);
    params.weights.push_back(std::move(w));
  }
  return params;
}

void Report::add(const std::string& key, const std::string& value) {
  body_ += key + " " + value + "\n";
}
void Report::add(const std::string& key, const char* value) {
  add(key, std::string(value));
}
void Report::add(const std::string& key, double value) {
  add(key, format_double(value));
}
void Report::add(const std::string& key, long value) {
  add(key, std::to_string(value));
}
void Report::add(const std::string& key, std::uint64_t value) {
  add(key, std::to_string(value));
}

void Report::write(const std::string& path) const {
  write_file(path, body_);
}

}  // namespace spaceform
