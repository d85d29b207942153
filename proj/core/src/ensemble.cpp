#include "airydim/ensemble.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "airydim/io.hpp"
#include "airydim/parallel.hpp"

namespace airydim::stats {

namespace {

constexpr char kMagic[8] = {'A', 'I', 'R', 'Y', 'E', 'N', 'S', '1'};

EnsembleSpec resolved(EnsembleSpec spec) {
  if (spec.mode == lpp::SweepMode::LineToPoint && spec.window_halfwidth == 0)
    spec.window_halfwidth = lpp::window_floor(spec.N);
  if (spec.mode == lpp::SweepMode::PointToPoint) spec.window_halfwidth = 0;
  return spec;
}

std::uint64_t fields_hash(const EnsembleSpec& s) {
  std::uint64_t h = 0;
  for (std::uint64_t v :
       {static_cast<std::uint64_t>(s.mode), static_cast<std::uint64_t>(s.N),
        static_cast<std::uint64_t>(s.offsets.first), static_cast<std::uint64_t>(s.offsets.last),
        static_cast<std::uint64_t>(s.window_halfwidth), s.master_seed, s.first_stream,
        static_cast<std::uint64_t>(s.replicas), std::bit_cast<std::uint64_t>(s.horizon_fraction)})
    h = lpp::detail::mix64(h ^ v) + 0x9e3779b97f4a7c15ULL;
  return h;
}

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("ensemble file truncated");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

bool EnsembleSpec::same_data(const EnsembleSpec& other) const noexcept {
  const EnsembleSpec a = resolved(*this);
  const EnsembleSpec b = resolved(other);
  return a.mode == b.mode && a.N == b.N && a.offsets.first == b.offsets.first &&
         a.offsets.last == b.offsets.last && a.window_halfwidth == b.window_halfwidth &&
         a.master_seed == b.master_seed && a.first_stream == b.first_stream &&
         a.replicas == b.replicas && a.horizon_fraction == b.horizon_fraction;
}

Ensemble::Ensemble(EnsembleSpec spec, std::vector<double> passage)
    : spec_(resolved(spec)), passage_(std::move(passage)) {
  if (passage_.size() != spec_.replicas * width())
    throw std::invalid_argument("ensemble data size does not match replicas x offsets");
}

double Ensemble::passage(std::size_t replica, std::int64_t k) const {
  if (replica >= replicas() || !has_offset(k))
    throw std::out_of_range("ensemble has no replica " + std::to_string(replica) + " at offset " +
                            std::to_string(k));
  return passage_[replica * width() + static_cast<std::size_t>(k - spec_.offsets.first)];
}

std::span<const double> Ensemble::row(std::size_t replica) const {
  if (replica >= replicas()) throw std::out_of_range("replica index out of range");
  return {passage_.data() + replica * width(), width()};
}

double Ensemble::scaled(std::size_t replica, std::int64_t k) const {
  return (passage(replica, k) - 4.0 * static_cast<double>(spec_.N)) / airy::fluctuation_scale(spec_.N);
}

double Ensemble::airy2(std::size_t replica, std::int64_t k) const {
  if (spec_.mode != lpp::SweepMode::PointToPoint)
    throw std::logic_error("Airy2 values need a point-to-point ensemble");
  return airy::airy2_value(passage(replica, k), spec_.N, k, airy::Centering::Parabolic);
}

double Ensemble::airy1(std::size_t replica, std::int64_t k) const {
  if (spec_.mode != lpp::SweepMode::LineToPoint)
    throw std::logic_error("Airy1 values need a line-to-point ensemble");
  return airy::airy1_value(passage(replica, k), spec_.N);
}

std::int64_t Ensemble::offset_for(airy::Process p, double t) const {
  return airy::offset_for_time(p, spec_.N, t);
}

Ensemble run_ensemble(const EnsembleSpec& requested) {
  const EnsembleSpec spec = resolved(requested);
  if (spec.replicas == 0) throw std::invalid_argument("ensemble needs at least one replica");
  const std::size_t width = static_cast<std::size_t>(spec.offsets.count());
  std::vector<double> data(spec.replicas * width);
  lpp::SweepOptions options;
  options.max_offset_fraction = spec.horizon_fraction;
  parallel_for(static_cast<std::int64_t>(spec.replicas), spec.threads, [&](std::int64_t r) {
    const lpp::WeightOracle oracle(spec.master_seed, spec.first_stream + static_cast<std::uint64_t>(r));
    const lpp::SweepResult sweep =
        spec.mode == lpp::SweepMode::PointToPoint
            ? lpp::sweep_point_to_point(oracle, spec.N, spec.offsets, options)
            : lpp::sweep_line_to_point(oracle, spec.N, spec.offsets, spec.window_halfwidth, options);
    std::copy(sweep.passage_times.begin(), sweep.passage_times.end(),
              data.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * width));
  });
  return Ensemble(spec, std::move(data));
}

void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path) {
  const EnsembleSpec& s = ensemble.spec();
  std::string out(kMagic, sizeof kMagic);
  put(out, static_cast<std::int64_t>(s.mode));
  put(out, s.N);
  put(out, s.offsets.first);
  put(out, s.offsets.last);
  put(out, s.window_halfwidth);
  put(out, s.master_seed);
  put(out, s.first_stream);
  put(out, static_cast<std::uint64_t>(s.replicas));
  put(out, s.horizon_fraction);
  out.append(reinterpret_cast<const char*>(ensemble.data().data()),
             ensemble.data().size() * sizeof(double));
  io::write_file_atomic(path, out);
}

std::optional<Ensemble> load_ensemble(const std::filesystem::path& path, const EnsembleSpec& spec) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  const std::string in = io::read_file(path);
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
    return std::nullopt;
  std::size_t pos = sizeof kMagic;
  EnsembleSpec s;
  s.mode = static_cast<lpp::SweepMode>(get<std::int64_t>(in, pos));
  s.N = get<std::int64_t>(in, pos);
  s.offsets.first = get<std::int64_t>(in, pos);
  s.offsets.last = get<std::int64_t>(in, pos);
  s.window_halfwidth = get<std::int64_t>(in, pos);
  s.master_seed = get<std::uint64_t>(in, pos);
  s.first_stream = get<std::uint64_t>(in, pos);
  s.replicas = static_cast<std::size_t>(get<std::uint64_t>(in, pos));
  s.horizon_fraction = get<double>(in, pos);
  if (!s.same_data(spec)) return std::nullopt;
  const std::size_t count = s.replicas * static_cast<std::size_t>(s.offsets.count());
  if (in.size() - pos != count * sizeof(double)) return std::nullopt;
  std::vector<double> data(count);
  std::memcpy(data.data(), in.data() + pos, count * sizeof(double));
  s.threads = spec.threads;
  return Ensemble(s, std::move(data));
}

Ensemble cached_ensemble(const EnsembleSpec& spec, const std::filesystem::path& cache_dir) {
  std::ostringstream name;
  name << "ensemble-" << std::hex << fields_hash(resolved(spec)) << ".bin";
  const auto path = cache_dir / name.str();
  if (auto hit = load_ensemble(path, spec)) return std::move(*hit);
  Ensemble e = run_ensemble(spec);
  save_ensemble(e, path);
  return e;
}

}  // namespace airydim::stats
