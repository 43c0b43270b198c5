#include "spikelab/report.hpp"

#include "spikelab/errors.hpp"

#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

namespace spikelab {

namespace fs = std::filesystem;

std::string Table::header_line() const {
  std::string s = "# schema " + name + " v" + std::to_string(version) + ":";
  for (std::size_t k = 0; k < columns.size(); ++k)
    s += (k ? "; " : " ") + columns[k].name + " = " + columns[k].description;
  return s;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  } visit;
  return std::visit(visit, c);
}

nlohmann::ordered_json json_value(const Cell& c) {
  struct {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(double v) const {
      return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    }
    nlohmann::ordered_json operator()(long long v) const { return v; }
    nlohmann::ordered_json operator()(bool v) const { return v; }
    nlohmann::ordered_json operator()(const std::string& v) const { return v; }
  } visit;
  return std::visit(visit, c);
}

// Opens for append, writing `first` (and `second`) when the file is new and
// checking `first` against the existing file otherwise.
std::ofstream open_table(const fs::path& path, const std::string& first, const std::string& second) {
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (line != first) throw Error("ledger '" + path.string() + "' was written with a different schema");
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot append to '" + path.string() + "'");
    return out;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot create '" + path.string() + "'");
  out << first << '\n';
  if (!second.empty()) out << second << '\n';
  return out;
}

}  // namespace

Ledger::Ledger(std::string directory, bool csv, bool json) : directory_(std::move(directory)), csv_(csv), json_(json) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) throw Error("cannot create output directory '" + directory_ + "': " + ec.message());
}

void Ledger::append(const Table& table, const std::vector<Cell>& row) {
  if (row.size() != table.columns.size())
    throw Error("ledger row for '" + table.name + "' has " + std::to_string(row.size()) + " cells, schema has " +
                std::to_string(table.columns.size()));
  const std::lock_guard<std::mutex> lock(mutex_);
  if (csv_) {
    std::string header;
    for (std::size_t k = 0; k < table.columns.size(); ++k) header += (k ? "," : "") + table.columns[k].name;
    std::ofstream out = open_table(fs::path(directory_) / (table.name + ".csv"), table.header_line(), header);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(row[k]);
    out << '\n';
  }
  if (json_) {
    nlohmann::ordered_json schema;
    schema["schema"] = table.name;
    schema["version"] = table.version;
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (const auto& c : table.columns) cols[c.name] = c.description;
    schema["columns"] = cols;
    std::ofstream out = open_table(fs::path(directory_) / (table.name + ".jsonl"), schema.dump(), "");
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k) j[table.columns[k].name] = json_value(row[k]);
    out << j.dump() << '\n';
  }
}

std::string checkpoint_directory(const std::string& output_dir, std::uint64_t key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, key);
  return (fs::path(output_dir) / "checkpoints" / buf).string();
}

void write_checkpoint(const std::string& path, const GroundState& gs) {
  const fs::path p(path);
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  if (ec) throw Error("cannot create checkpoint directory '" + p.parent_path().string() + "'");
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write checkpoint '" + tmp.string() + "'");
    write_ground_state(out, gs);
  }
  fs::rename(tmp, p);
}

std::optional<GroundState> read_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  return read_ground_state(in);
}

void run_pool(std::size_t n, int workers, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace spikelab
