#include "planecell/io.hpp"

#include <cstring>
#include <fstream>

#include "planecell/version.hpp"

namespace planecell::io {

namespace {

constexpr std::size_t kMagicLen = 32;

std::string magic_header() {
  std::string magic = std::string("PLANECELLFLD ") + kSchemaVersion;
  magic.resize(kMagicLen - 1, ' ');
  magic.push_back('\n');
  return magic;
}

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("field dump: truncated file");
  return v;
}

}  // namespace

void write_field_dump(const std::string& path, const Field& field,
                      std::span<const double> omega, double epsilon,
                      const std::string& config_echo) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  const std::string magic = magic_header();
  out.write(magic.data(), std::streamsize(magic.size()));
  write_pod<std::uint64_t>(out, config_echo.size());
  out.write(config_echo.data(), std::streamsize(config_echo.size()));
  const TorusSpec& t = field.spec();
  write_pod<std::int64_t>(out, t.d);
  write_pod<std::int64_t>(out, t.N);
  write_pod<std::int64_t>(out, t.m);
  write_pod<double>(out, epsilon);
  for (double w : omega) write_pod<double>(out, w);
  for (std::size_t i = 0; i < field.size(); ++i) write_pod<double>(out, field[i]);
  if (!out) throw Error("write failure on " + path);
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, magic_header().data(), kMagicLen) != 0)
    throw Error("field dump: bad magic in " + path);

  FieldDump dump;
  const std::uint64_t echo_len = read_pod<std::uint64_t>(in);
  dump.config_echo.resize(echo_len);
  in.read(dump.config_echo.data(), std::streamsize(echo_len));
  dump.torus.d = int(read_pod<std::int64_t>(in));
  dump.torus.N = int(read_pod<std::int64_t>(in));
  dump.torus.m = int(read_pod<std::int64_t>(in));
  dump.torus.validate();
  dump.epsilon = read_pod<double>(in);
  dump.omega.resize(std::size_t(dump.torus.d));
  for (double& w : dump.omega) w = read_pod<double>(in);
  std::vector<double> values(dump.torus.node_count());
  for (double& v : values) v = read_pod<double>(in);
  dump.field = Field(dump.torus, std::move(values));
  return dump;
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t n_cols = 0;
};

CsvWriter::CsvWriter(const std::string& path, const std::string& config_echo,
                     std::vector<std::string> columns)
    : impl_(new Impl) {
  impl_->out.open(path, std::ios::trunc);
  if (!impl_->out) throw Error("cannot open " + path + " for writing");
  impl_->n_cols = columns.size();
  impl_->out << "# schema: " << kSchemaVersion << "\n";
  impl_->out << "# config: " << config_echo << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    impl_->out << (i ? "," : "") << columns[i];
  impl_->out << "\n";
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != impl_->n_cols) throw Error("csv row has wrong arity");
  for (std::size_t i = 0; i < values.size(); ++i)
    impl_->out << (i ? "," : "") << format_double(values[i]);
  impl_->out << "\n";
}

void CsvWriter::raw_row(const std::string& line) { impl_->out << line << "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << content;
}

}  // namespace planecell::io
