#include "fraclab/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace fraclab {

namespace {

constexpr char kMagic[4] = {'F', 'L', 'F', '1'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  require(static_cast<bool>(is), Errc::io_error, "unexpected end of file");
  return v;
}

}  // namespace

void write_field_bin(const Field& u, FractionalOrder s, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  require(static_cast<bool>(os), Errc::io_error, "cannot open " + path.string());
  os.write(kMagic, 4);
  put<double>(os, u.grid().period);
  put<std::uint64_t>(os, u.grid().n_points);
  put<std::uint64_t>(os, u.n_times());
  put<double>(os, s.s);
  for (double t : u.times()) put<double>(os, t);
  for (double v : u.raw_values()) put<double>(os, v);
  require(static_cast<bool>(os), Errc::io_error, "write failed: " + path.string());
}

LoadedField read_field_bin(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), Errc::io_error, "cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  require(static_cast<bool>(is) && std::memcmp(magic, kMagic, 4) == 0, Errc::io_error,
          "bad field container magic");
  const double period = get<double>(is);
  const auto n_points = get<std::uint64_t>(is);
  const auto n_times = get<std::uint64_t>(is);
  const double s = get<double>(is);
  std::vector<double> times(n_times);
  for (auto& t : times) t = get<double>(is);
  std::vector<double> values(n_times * n_points);
  for (auto& v : values) v = get<double>(is);
  return LoadedField{Field(Grid::make(period, n_points), std::move(times), std::move(values)),
                     FractionalOrder::of(s)};
}

void write_field_csv(const Field& u, const std::filesystem::path& path) {
  std::ofstream os(path);
  require(static_cast<bool>(os), Errc::io_error, "cannot open " + path.string());
  os << "t,x,u\n";
  os.precision(17);
  for (std::size_t j = 0; j < u.n_times(); ++j) {
    auto row = u.level(j);
    for (std::size_t i = 0; i < u.grid().n_points; ++i)
      os << u.times()[j] << ',' << u.grid().x(i) << ',' << row[i] << '\n';
  }
}

void write_flowpath_csv(const FlowPath& path, const std::filesystem::path& file) {
  std::ofstream os(file);
  require(static_cast<bool>(os), Errc::io_error, "cannot open " + file.string());
  os << "t,A,residual\n";
  os.precision(17);
  for (std::size_t j = 0; j < path.times.size(); ++j) {
    double res = 0.0;
    if (j + 1 < path.times.size()) {
      res = (path.positions[j + 1] - path.positions[j]) / (path.times[j + 1] - path.times[j]);
    }
    os << path.times[j] << ',' << path.positions[j] << ',' << res << '\n';
  }
}

void write_decay_csv(const DecaySequence& seq, double alpha, const std::filesystem::path& file) {
  std::ofstream os(file);
  require(static_cast<bool>(os), Errc::io_error, "cannot open " + file.string());
  os << "k,scale,osc,bound,verdict\n";
  os.precision(17);
  for (std::size_t k = 0; k < seq.oscillations.size(); ++k) {
    const double scale = std::pow(seq.ratio, static_cast<double>(k));
    const double bound = std::pow(seq.ratio, alpha * static_cast<double>(k));
    os << k << ',' << scale << ',' << seq.oscillations[k] << ',' << bound << ','
       << (seq.oscillations[k] <= bound + 1e-9 ? "pass" : "fail") << '\n';
  }
}

json kit_to_json(const BarrierKit& kit, FractionalOrder s) {
  return json{{"s", s.s},
              {"A", kit.speed_A},
              {"mu", kit.mu},
              {"c0", kit.c0},
              {"C1", kit.C1},
              {"eps0", kit.eps0},
              {"theta", kit.theta},
              {"beta1", kit.beta1},
              {"bump_id", kit.bump.id},
              {"battery_hash", kit.battery_hash}};
}

BarrierKit kit_from_json(const json& j) {
  BumpProfile bump;
  require(j.at("bump_id").get<std::string>() == bump.id, Errc::config_invalid,
          "unknown bump profile id");
  return BarrierKit::make(bump, j.at("A").get<double>(), j.at("mu").get<double>(),
                          j.at("c0").get<double>(), j.at("C1").get<double>(),
                          j.at("eps0").get<double>(), j.at("beta1").get<double>(),
                          j.value("battery_hash", 0ULL));
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream os(path);
  require(static_cast<bool>(os), Errc::io_error, "cannot open " + path.string());
  os << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), Errc::io_error, "cannot open " + path.string());
  json j;
  is >> j;
  return j;
}

}  // namespace fraclab
