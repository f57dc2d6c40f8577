#include "osc/csvio.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "osc/types.hpp"

namespace osc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool meta_line(const std::string& line, std::pair<std::string, std::string>& kv) {
  if (line.rfind("# ", 0) != 0) return false;
  const auto eq = line.find(" = ");
  if (eq == std::string::npos) return false;
  kv = {line.substr(2, eq - 2), line.substr(eq + 3)};
  return true;
}

std::string lookup(const std::vector<std::pair<std::string, std::string>>& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) return v;
  }
  return "";
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string CsvTable::meta_value(const std::string& key) const { return lookup(meta, key); }
std::string CsvTable::footer_value(const std::string& key) const { return lookup(footer, key); }

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw SchemaError("missing columns: " + name);
  std::vector<double> out;
  for (const auto& r : rows) {
    double v = 0.0;
    const std::string& s = r[c];
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw SchemaError("column " + name + ": non-numeric value '" + s + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::string fmt(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string render_csv(const CsvTable& t) {
  std::ostringstream o;
  for (const auto& [k, v] : t.meta) o << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) o << (i ? "," : "") << t.header[i];
  o << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
    o << '\n';
  }
  for (const auto& [k, v] : t.footer) o << "# " << k << " = " << v << '\n';
  o << "# rows = " << t.rows.size() << '\n';
  return o.str();
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  long declared = -1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::pair<std::string, std::string> kv;
    if (line[0] == '#') {
      if (!meta_line(line, kv)) continue;
      if (!have_header) {
        t.meta.push_back(kv);
      } else if (kv.first == "rows") {
        declared = std::stol(kv.second);
      } else {
        t.footer.push_back(kv);
      }
      continue;
    }
    if (declared >= 0) throw SchemaError("data after the row-count line");
    if (!have_header) {
      t.header = split_fields(line);
      have_header = true;
      continue;
    }
    auto fields = split_fields(line);
    if (fields.size() != t.header.size()) {
      throw SchemaError("row " + std::to_string(t.rows.size() + 1) + " has " + std::to_string(fields.size()) +
                        " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw SchemaError("missing header line");
  if (declared < 0) throw SchemaError("truncated file: missing row-count line");
  if (declared != static_cast<long>(t.rows.size())) {
    throw SchemaError("truncated file: " + std::to_string(t.rows.size()) + " rows, expected " +
                      std::to_string(declared));
  }
  return t;
}

CsvTable read_csv(const std::string& path) { return parse_csv(read_file(path)); }

void require_columns(const CsvTable& t, const std::vector<std::string>& columns) {
  std::string missing;
  for (const auto& c : columns) {
    if (t.column(c) < 0) missing += (missing.empty() ? "" : ", ") + c;
  }
  if (!missing.empty()) throw SchemaError("missing columns: " + missing);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp + "'");
    f << content;
    f.flush();
    if (!f) throw ConfigError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace osc
