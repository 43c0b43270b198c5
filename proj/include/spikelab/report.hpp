#pragma once

#include "spikelab/ground_state.hpp"

#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace spikelab {

/// One ledger cell. monostate is written as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct Column {
  std::string name;
  std::string description;
};

/// Schema of one output table; the version is bumped on any column change.
struct Table {
  std::string name;
  int version = 1;
  std::vector<Column> columns;

  /// "# schema <name> v<version>: a = ...; b = ..."
  std::string header_line() const;
};

/// %.17g, or "nan" / "inf" / "-inf".
std::string format_double(double v);

/// Append-only CSV and JSON-lines writer. Each table lives in
/// <directory>/<name>.csv and <name>.jsonl, both starting with a schema line.
/// Appending to a file whose schema line differs throws Error. Calls are
/// serialized, so one ledger can be shared by a worker pool.
class Ledger {
 public:
  Ledger(std::string directory, bool csv, bool json);

  void append(const Table& table, const std::vector<Cell>& row);
  const std::string& directory() const { return directory_; }

 private:
  std::string directory_;
  bool csv_;
  bool json_;
  std::mutex mutex_;
};

/// <output>/checkpoints/<16 hex digits of the key hash>.
std::string checkpoint_directory(const std::string& output_dir, std::uint64_t key);

/// Written to a temporary file and renamed into place.
void write_checkpoint(const std::string& path, const GroundState& gs);
/// Empty when the file is absent; ConfigError when it is malformed.
std::optional<GroundState> read_checkpoint(const std::string& path);

/// Runs task(0..n-1) on up to `workers` threads. After all tasks finish, the
/// exception of the lowest failing index (if any) is rethrown.
void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& task);

}  // namespace spikelab
