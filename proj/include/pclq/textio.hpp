#ifndef PCLQ_TEXTIO_HPP_
#define PCLQ_TEXTIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pclq/estimators.hpp"
#include "pclq/lqr.hpp"
#include "pclq/structure.hpp"

namespace pclq {

// Line-oriented UTF-8 container with named fields, shared by system files,
// dataset files, and experiment configs:
//
//   format_version 1
//   kind system
//   scalar d 2
//   matrix A 2 2
//   1.00000000000000000e+00 ...
//   list blocks1 1
//   0
//
// Floating-point values are written with 17 significant digits so that a
// save/load round trip is exact; field order is preserved.
class TextDoc {
 public:
  explicit TextDoc(std::string kind = "generic") : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

  void set_scalar(const std::string& name, const std::string& value);
  void set_scalar(const std::string& name, double value);
  void set_scalar(const std::string& name, std::int64_t value);
  void set_scalar(const std::string& name, std::uint64_t value);
  void set_list(const std::string& name, const std::vector<std::string>& values);
  void set_list(const std::string& name, const std::vector<double>& values);
  void set_list(const std::string& name, const std::vector<int>& values);
  void set_matrix(const std::string& name, const Eigen::MatrixXd& value);

  bool has_scalar(const std::string& name) const;
  bool has_list(const std::string& name) const;
  bool has_matrix(const std::string& name) const;

  std::string scalar(const std::string& name) const;
  double scalar_double(const std::string& name) const;
  std::int64_t scalar_int(const std::string& name) const;
  std::uint64_t scalar_uint(const std::string& name) const;
  std::vector<std::string> list(const std::string& name) const;
  std::vector<double> list_doubles(const std::string& name) const;
  std::vector<int> list_ints(const std::string& name) const;
  Eigen::MatrixXd matrix(const std::string& name) const;

  void save(const std::filesystem::path& path) const;
  static TextDoc load(const std::filesystem::path& path);

 private:
  enum class FieldKind { kScalar, kList, kMatrix };
  struct Field {
    FieldKind field_kind;
    std::string name;
    std::string scalar_value;
    std::vector<std::string> list_values;
    Eigen::MatrixXd matrix_value;
  };

  const Field& find(const std::string& name, FieldKind kind) const;
  Field& upsert(const std::string& name, FieldKind kind);

  std::string kind_;
  std::vector<Field> fields_;
};

// Double formatted with >= 17 significant digits (round-trip exact).
std::string format_full(double value);

// ---------------------------------------------------------------------------
// Concrete file schemas.
// ---------------------------------------------------------------------------

struct LoadedSystem {
  LqSystem system;
  std::optional<SparsityBlocks> blocks;
};

void write_system_file(const std::filesystem::path& path, const LqSystem& sys,
                       const std::optional<SparsityBlocks>& blocks = {});
LoadedSystem read_system_file(const std::filesystem::path& path);

void write_dataset_file(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset_file(const std::filesystem::path& path);

}  // namespace pclq

#endif  // PCLQ_TEXTIO_HPP_
