#include <algorithm>
#include <random>

#include "grouptc/io.hpp"
#include "grouptc/train.hpp"

namespace gtc {

Matrix Split::matrix(const std::vector<std::size_t>& rows) const {
  if (rows.empty()) return Matrix();
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(inputs[rows[0]].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(inputs[rows[r]].data(), static_cast<Eigen::Index>(inputs[rows[r]].size()));
  return out;
}

PermutationAction dataset_action(const Dataset& data) {
  auto group = make_group_ptr(data.group);
  switch (data.shape.kind) {
    case DomainKind::SquareGrid: return square_grid_action(group, data.shape.side);
    case DomainKind::CubeGrid: return cube_grid_action(group, data.shape.side);
    case DomainKind::Group: return regular_action(group);
  }
  throw Error(ErrorKind::UnsupportedGroup, "unknown domain kind");
}

namespace {

bool is_cube_group(const GroupSpec& g) {
  return g.family == GroupFamily::Octahedral || g.family == GroupFamily::FullOctahedral;
}

// Random walk of bright cells; rejected while any non-identity element fixes it.
std::vector<double> make_sprite(const PermutationAction& action, std::mt19937_64& rng) {
  const int m = action.domain_size();
  const int dims = action.shape().kind == DomainKind::CubeGrid ? 3 : 2;
  const int n = action.shape().side;
  std::uniform_real_distribution<double> level(0.3, 1.0);
  std::uniform_int_distribution<int> cell(0, m - 1), axis(0, dims - 1), sign(0, 1);
  for (;;) {
    std::vector<double> sprite(static_cast<std::size_t>(m), 0.0);
    int pos = cell(rng);
    const int steps = std::max(3, m / 4);
    for (int s = 0; s < steps; ++s) {
      sprite[static_cast<std::size_t>(pos)] = level(rng);
      std::array<int, 3> c{};
      int rest = pos;
      for (int d = dims - 1; d >= 0; --d) {
        c[d] = rest % n;
        rest /= n;
      }
      const int a = axis(rng);
      c[a] = std::clamp(c[a] + (sign(rng) ? 1 : -1), 0, n - 1);
      pos = 0;
      for (int d = 0; d < dims; ++d) pos = pos * n + c[d];
    }
    bool symmetric = false;
    for (int g = 0; g < action.group().order() && !symmetric; ++g)
      if (g != action.group().identity() && apply_signal_action<double>(action, g, sprite) == sprite) symmetric = true;
    if (!symmetric || action.group().order() == 1) return sprite;
  }
}

// Each non-zero pixel moves one step along a random axis with probability p.
std::vector<double> displace(const std::vector<double>& sprite, const DomainShape& shape, double p,
                             std::mt19937_64& rng) {
  if (p <= 0.0) return sprite;
  const int dims = shape.kind == DomainKind::CubeGrid ? 3 : 2;
  const int n = shape.side;
  std::bernoulli_distribution move(p);
  std::uniform_int_distribution<int> axis(0, dims - 1), sign(0, 1);
  std::vector<double> out(sprite.size(), 0.0);
  for (std::size_t pos = 0; pos < sprite.size(); ++pos) {
    if (sprite[pos] == 0.0) continue;
    std::size_t dst = pos;
    if (move(rng)) {
      std::array<int, 3> c{};
      std::size_t rest = pos;
      for (int d = dims - 1; d >= 0; --d) {
        c[d] = static_cast<int>(rest % n);
        rest /= n;
      }
      const int a = axis(rng);
      c[a] = std::clamp(c[a] + (sign(rng) ? 1 : -1), 0, n - 1);
      dst = 0;
      for (int d = 0; d < dims; ++d) dst = dst * n + c[d];
    }
    out[dst] = std::max(out[dst], sprite[pos]);
  }
  return out;
}

void fill_split(Split& split, const PermutationAction& action, const std::vector<std::vector<double>>& prototypes,
                int per_class, double noise, double jitter, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> element(0, action.group().order() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < per_class; ++i)
    for (std::size_t c = 0; c < prototypes.size(); ++c) {
      const int h = element(rng);
      auto x = apply_signal_action<double>(action, h, displace(prototypes[c], action.shape(), jitter, rng));
      if (noise > 0.0)
        for (auto& v : x) v += noise * gauss(rng);
      split.inputs.push_back(std::move(x));
      split.labels.push_back(static_cast<int>(c));
      split.elements.push_back(h);
    }
}

}  // namespace

SynthOptions desk_synth_options() {
  SynthOptions o;
  o.n_classes = 10;
  o.n_per_class = 100;
  o.n_test_per_class = 30;
  o.grid = 9;
  o.noise = 0.1;
  o.jitter = 0.3;
  return o;
}

Dataset synth_dataset(const GroupSpec& group, const SynthOptions& options) {
  if (options.n_classes < 1 || options.n_per_class < 2 || options.n_test_per_class < 0 || options.grid < 1)
    throw Error(ErrorKind::ShapeMismatch, "dataset sizes must be positive (at least 2 samples per class)");
  if (options.noise < 0.0) throw Error(ErrorKind::BadFlag, "noise must be non-negative");
  if (options.jitter < 0.0 || options.jitter > 1.0) throw Error(ErrorKind::BadFlag, "jitter must lie in [0, 1]");
  Dataset data;
  data.group = group;
  data.shape = {is_cube_group(group) ? DomainKind::CubeGrid : DomainKind::SquareGrid, options.grid};
  data.n_classes = options.n_classes;
  const PermutationAction action = dataset_action(data);

  std::mt19937_64 rng(options.seed);
  for (int c = 0; c < options.n_classes; ++c) data.prototypes.push_back(make_sprite(action, rng));

  Split all;
  fill_split(all, action, data.prototypes, options.n_per_class, options.noise, options.jitter, rng);
  const std::size_t n_train = all.size() * 4 / 5;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Split& dst = i < n_train ? data.train : data.val;
    dst.inputs.push_back(std::move(all.inputs[i]));
    dst.labels.push_back(all.labels[i]);
    dst.elements.push_back(all.elements[i]);
  }
  fill_split(data.test, action, data.prototypes, options.n_test_per_class, options.noise, options.jitter, rng);
  return data;
}

namespace {

std::uint32_t read_be32(const std::string& bytes, std::size_t offset) {
  if (bytes.size() < offset + 4) throw Error(ErrorKind::TruncatedFile, "IDX header ends early");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
  return v;
}

}  // namespace

IdxImages parse_idx_images(const std::string& bytes) {
  const auto magic = read_be32(bytes, 0);
  if (magic != 0x00000803) throw Error(ErrorKind::BadMagic, "image file magic is " + std::to_string(magic));
  IdxImages out;
  out.count = static_cast<int>(read_be32(bytes, 4));
  out.rows = static_cast<int>(read_be32(bytes, 8));
  out.cols = static_cast<int>(read_be32(bytes, 12));
  const std::size_t payload = static_cast<std::size_t>(out.count) * out.rows * out.cols;
  if (bytes.size() < 16 + payload)
    throw Error(ErrorKind::TruncatedFile,
                "image payload has " + std::to_string(bytes.size() - 16) + " of " + std::to_string(payload) + " bytes");
  out.pixels.assign(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(payload));
  return out;
}

std::vector<int> parse_idx_labels(const std::string& bytes) {
  const auto magic = read_be32(bytes, 0);
  if (magic != 0x00000801) throw Error(ErrorKind::BadMagic, "label file magic is " + std::to_string(magic));
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() < 8 + count) throw Error(ErrorKind::TruncatedFile, "label payload ends early");
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(static_cast<unsigned char>(bytes[8 + i]));
  return out;
}

std::vector<double> downsample_nearest(std::span<const std::uint8_t> image, int rows, int cols, int n) {
  if (n < 1 || n > rows || n > cols || image.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(ErrorKind::DimensionMismatch, "cannot resize " + std::to_string(rows) + "x" + std::to_string(cols) +
                                                  " to " + std::to_string(n) + "x" + std::to_string(n));
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int si = i * rows / n, sj = j * cols / n;
      out[static_cast<std::size_t>(i) * n + j] = image[static_cast<std::size_t>(si) * cols + sj] / 255.0;
    }
  return out;
}

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path, int limit, int n,
                         std::uint64_t seed) {
  const auto images = parse_idx_images(read_text_file(images_path));
  const auto labels = parse_idx_labels(read_text_file(labels_path));
  if (static_cast<int>(labels.size()) != images.count)
    throw Error(ErrorKind::DimensionMismatch, "image and label counts differ");
  const int keep = limit > 0 ? std::min(limit, images.count) : images.count;

  Dataset data;
  data.group = GroupSpec::dihedral(4);
  data.shape = {DomainKind::SquareGrid, n};
  const PermutationAction action = dataset_action(data);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> element(0, action.group().order() - 1);
  const std::size_t pixels = static_cast<std::size_t>(images.rows) * images.cols;
  const int n_fit = keep * 4 / 5, n_train = n_fit * 4 / 5;
  for (int i = 0; i < keep; ++i) {
    const std::span<const std::uint8_t> img(images.pixels.data() + i * pixels, pixels);
    const int h = element(rng);
    Split& dst = i < n_train ? data.train : (i < n_fit ? data.val : data.test);
    dst.inputs.push_back(apply_signal_action<double>(action, h, downsample_nearest(img, images.rows, images.cols, n)));
    dst.labels.push_back(labels[static_cast<std::size_t>(i)]);
    dst.elements.push_back(h);
    data.n_classes = std::max(data.n_classes, labels[static_cast<std::size_t>(i)] + 1);
  }
  return data;
}

}  // namespace gtc
