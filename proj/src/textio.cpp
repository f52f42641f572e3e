#include "pclq/textio.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pclq/errors.hpp"

namespace pclq {

namespace {

constexpr int kFormatVersion = 1;

std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream stream(line);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

double parse_double(const std::string& token, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  require(end == token.c_str() + token.size() && errno == 0, ErrorCode::kIoFailure,
          "cannot parse '" + token + "' as a number in " + context);
  return value;
}

std::int64_t parse_int(const std::string& token, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(token.c_str(), &end, 10);
  require(end == token.c_str() + token.size() && errno == 0, ErrorCode::kIoFailure,
          "cannot parse '" + token + "' as an integer in " + context);
  return value;
}

}  // namespace

std::string format_full(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void TextDoc::set_scalar(const std::string& name, const std::string& value) {
  upsert(name, FieldKind::kScalar).scalar_value = value;
}

void TextDoc::set_scalar(const std::string& name, double value) {
  set_scalar(name, format_full(value));
}

void TextDoc::set_scalar(const std::string& name, std::int64_t value) {
  set_scalar(name, std::to_string(value));
}

void TextDoc::set_scalar(const std::string& name, std::uint64_t value) {
  set_scalar(name, std::to_string(value));
}

void TextDoc::set_list(const std::string& name, const std::vector<std::string>& values) {
  upsert(name, FieldKind::kList).list_values = values;
}

void TextDoc::set_list(const std::string& name, const std::vector<double>& values) {
  std::vector<std::string> tokens;
  tokens.reserve(values.size());
  for (double v : values) tokens.push_back(format_full(v));
  set_list(name, tokens);
}

void TextDoc::set_list(const std::string& name, const std::vector<int>& values) {
  std::vector<std::string> tokens;
  tokens.reserve(values.size());
  for (int v : values) tokens.push_back(std::to_string(v));
  set_list(name, tokens);
}

void TextDoc::set_matrix(const std::string& name, const Eigen::MatrixXd& value) {
  upsert(name, FieldKind::kMatrix).matrix_value = value;
}

bool TextDoc::has_scalar(const std::string& name) const {
  for (const Field& f : fields_) {
    if (f.name == name && f.field_kind == FieldKind::kScalar) return true;
  }
  return false;
}

bool TextDoc::has_list(const std::string& name) const {
  for (const Field& f : fields_) {
    if (f.name == name && f.field_kind == FieldKind::kList) return true;
  }
  return false;
}

bool TextDoc::has_matrix(const std::string& name) const {
  for (const Field& f : fields_) {
    if (f.name == name && f.field_kind == FieldKind::kMatrix) return true;
  }
  return false;
}

const TextDoc::Field& TextDoc::find(const std::string& name, FieldKind kind) const {
  for (const Field& f : fields_) {
    if (f.name == name && f.field_kind == kind) return f;
  }
  fail(ErrorCode::kIoFailure, "missing field '" + name + "' in " + kind_ + " document");
}

TextDoc::Field& TextDoc::upsert(const std::string& name, FieldKind kind) {
  for (Field& f : fields_) {
    if (f.name == name && f.field_kind == kind) return f;
  }
  fields_.push_back(Field{kind, name, {}, {}, {}});
  return fields_.back();
}

std::string TextDoc::scalar(const std::string& name) const {
  return find(name, FieldKind::kScalar).scalar_value;
}

double TextDoc::scalar_double(const std::string& name) const {
  return parse_double(scalar(name), "scalar " + name);
}

std::int64_t TextDoc::scalar_int(const std::string& name) const {
  return parse_int(scalar(name), "scalar " + name);
}

std::uint64_t TextDoc::scalar_uint(const std::string& name) const {
  const std::string token = scalar(name);
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(token.c_str(), &end, 10);
  require(end == token.c_str() + token.size() && errno == 0, ErrorCode::kIoFailure,
          "cannot parse '" + token + "' as an unsigned integer in scalar " + name);
  return value;
}

std::vector<std::string> TextDoc::list(const std::string& name) const {
  return find(name, FieldKind::kList).list_values;
}

std::vector<double> TextDoc::list_doubles(const std::string& name) const {
  std::vector<double> values;
  for (const std::string& token : list(name)) {
    values.push_back(parse_double(token, "list " + name));
  }
  return values;
}

std::vector<int> TextDoc::list_ints(const std::string& name) const {
  std::vector<int> values;
  for (const std::string& token : list(name)) {
    values.push_back(static_cast<int>(parse_int(token, "list " + name)));
  }
  return values;
}

Eigen::MatrixXd TextDoc::matrix(const std::string& name) const {
  return find(name, FieldKind::kMatrix).matrix_value;
}

void TextDoc::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  require(out.good(), ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out << "format_version " << kFormatVersion << "\n";
  out << "kind " << kind_ << "\n";
  for (const Field& f : fields_) {
    switch (f.field_kind) {
      case FieldKind::kScalar:
        out << "scalar " << f.name << " " << f.scalar_value << "\n";
        break;
      case FieldKind::kList: {
        out << "list " << f.name << " " << f.list_values.size() << "\n";
        for (std::size_t i = 0; i < f.list_values.size(); ++i) {
          if (i > 0) out << " ";
          out << f.list_values[i];
        }
        out << "\n";
        break;
      }
      case FieldKind::kMatrix: {
        out << "matrix " << f.name << " " << f.matrix_value.rows() << " "
            << f.matrix_value.cols() << "\n";
        for (Eigen::Index i = 0; i < f.matrix_value.rows(); ++i) {
          for (Eigen::Index j = 0; j < f.matrix_value.cols(); ++j) {
            if (j > 0) out << " ";
            out << format_full(f.matrix_value(i, j));
          }
          out << "\n";
        }
        break;
      }
    }
  }
  out.flush();
  require(out.good(), ErrorCode::kIoFailure, "write failed for " + path.string());
}

TextDoc TextDoc::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIoFailure, "cannot open " + path.string() + " for reading");
  const std::string context = path.string();

  std::string line;
  auto next_line = [&](const char* what) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIoFailure,
            "unexpected end of file while reading " + std::string(what) + " in " + context);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line("header");
  auto tokens = split_tokens(line);
  require(tokens.size() == 2 && tokens[0] == "format_version", ErrorCode::kIoFailure,
          "missing format_version header in " + context);
  require(parse_int(tokens[1], context) == kFormatVersion, ErrorCode::kIoFailure,
          "unsupported format_version in " + context);
  next_line("kind");
  tokens = split_tokens(line);
  require(tokens.size() == 2 && tokens[0] == "kind", ErrorCode::kIoFailure,
          "missing kind header in " + context);
  TextDoc doc(tokens[1]);

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "scalar") {
      require(tokens.size() == 3, ErrorCode::kIoFailure,
              "malformed scalar line in " + context);
      doc.set_scalar(tokens[1], tokens[2]);
    } else if (tokens[0] == "list") {
      require(tokens.size() == 3, ErrorCode::kIoFailure,
              "malformed list line in " + context);
      const auto count = static_cast<std::size_t>(parse_int(tokens[2], context));
      next_line("list values");
      auto values = split_tokens(line);
      require(values.size() == count, ErrorCode::kIoFailure,
              "list " + tokens[1] + " expected " + tokens[2] + " values in " + context);
      doc.set_list(tokens[1], values);
    } else if (tokens[0] == "matrix") {
      require(tokens.size() == 4, ErrorCode::kIoFailure,
              "malformed matrix line in " + context);
      const auto rows = parse_int(tokens[2], context);
      const auto cols = parse_int(tokens[3], context);
      require(rows >= 0 && cols >= 0, ErrorCode::kIoFailure,
              "negative matrix shape in " + context);
      Eigen::MatrixXd value(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        next_line("matrix row");
        auto row_tokens = split_tokens(line);
        require(row_tokens.size() == static_cast<std::size_t>(cols), ErrorCode::kIoFailure,
                "matrix " + tokens[1] + " row has wrong width in " + context);
        for (Eigen::Index j = 0; j < cols; ++j) {
          value(i, j) = parse_double(row_tokens[static_cast<std::size_t>(j)], context);
        }
      }
      doc.set_matrix(tokens[1], value);
    } else {
      fail(ErrorCode::kIoFailure, "unknown field tag '" + tokens[0] + "' in " + context);
    }
  }
  return doc;
}

void write_system_file(const std::filesystem::path& path, const LqSystem& sys,
                       const std::optional<SparsityBlocks>& blocks) {
  TextDoc doc("system");
  doc.set_scalar("d", static_cast<std::int64_t>(sys.state_dim()));
  doc.set_scalar("d_u", static_cast<std::int64_t>(sys.input_dim()));
  doc.set_matrix("A", sys.a);
  doc.set_matrix("B", sys.b);
  doc.set_matrix("Q", sys.q);
  doc.set_matrix("R", sys.r);
  if (blocks) {
    doc.set_list("blocks1", blocks->block1);
    doc.set_list("blocks2", blocks->block2);
    doc.set_list("blocks3", blocks->block3);
  }
  doc.save(path);
}

LoadedSystem read_system_file(const std::filesystem::path& path) {
  const TextDoc doc = TextDoc::load(path);
  require(doc.kind() == "system", ErrorCode::kIoFailure,
          path.string() + " is not a system file");
  const auto d = doc.scalar_int("d");
  const auto du = doc.scalar_int("d_u");
  LqSystem sys(doc.matrix("A"), doc.matrix("B"), doc.matrix("Q"), doc.matrix("R"));
  require(sys.state_dim() == d && sys.input_dim() == du, ErrorCode::kIoFailure,
          "declared dimensions do not match matrices in " + path.string());
  LoadedSystem loaded{std::move(sys), std::nullopt};
  if (doc.has_list("blocks1")) {
    SparsityBlocks blocks;
    blocks.block1 = doc.list_ints("blocks1");
    blocks.block2 = doc.list_ints("blocks2");
    blocks.block3 = doc.list_ints("blocks3");
    loaded.blocks = std::move(blocks);
  }
  return loaded;
}

void write_dataset_file(const std::filesystem::path& path, const Dataset& ds) {
  TextDoc doc("dataset");
  doc.set_scalar("N", static_cast<std::int64_t>(ds.size()));
  doc.set_scalar("sigma0", ds.sigma0);
  doc.set_matrix("X0", ds.x0);
  doc.set_matrix("U0", ds.u0);
  doc.set_matrix("X1", ds.x1);
  doc.save(path);
}

Dataset read_dataset_file(const std::filesystem::path& path) {
  const TextDoc doc = TextDoc::load(path);
  require(doc.kind() == "dataset", ErrorCode::kIoFailure,
          path.string() + " is not a dataset file");
  Dataset ds;
  ds.x0 = doc.matrix("X0");
  ds.u0 = doc.matrix("U0");
  ds.x1 = doc.matrix("X1");
  ds.sigma0 = doc.scalar_double("sigma0");
  require(doc.scalar_int("N") == ds.size(), ErrorCode::kIoFailure,
          "declared N does not match rows in " + path.string());
  validate_dataset(ds);
  return ds;
}

}  // namespace pclq
