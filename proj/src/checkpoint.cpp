#include "advrex/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace advrex {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payload assumes a little-endian host");

namespace {

constexpr const char* kHeader = "advrex-checkpoint v1";

void write_array(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::string expect_line(std::istream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError(path + ": truncated manifest");
  return line;
}

std::string expect_field(std::istream& in, const std::string& path,
                         const std::string& key) {
  const std::string line = expect_line(in, path);
  const std::string prefix = key + ": ";
  if (line.rfind(prefix, 0) != 0)
    throw LoadError(path + ": expected '" + key + "', got '" + line + "'");
  return line.substr(prefix.size());
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainerState& state,
                     std::uint64_t config_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError(path + ": cannot open for writing");

  std::ostringstream manifest;
  manifest << kHeader << "\n";
  manifest << "layer_sizes:";
  for (std::size_t s : state.params.layer_sizes) manifest << " " << s;
  manifest << "\n";
  manifest << "epoch: " << state.epoch << "\n";
  manifest << "seed: " << state.seed << "\n";
  manifest << "config_hash: " << std::hex << config_hash << std::dec << "\n";
  manifest << "rex_active: " << (state.rex_active ? 1 : 0) << "\n";

  // Array table, in payload order.
  std::size_t payload_doubles = 0;
  std::ostringstream table;
  const std::size_t n_layers = state.params.n_layers();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Matrix& w = state.params.weights[l];
    table << "w" << l << " " << w.rows << " " << w.cols << "\n";
    payload_doubles += w.size();
    table << "b" << l << " 1 " << state.params.biases[l].size() << "\n";
    payload_doubles += state.params.biases[l].size();
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Matrix& v = state.opt.w_velocity[l];
    table << "vw" << l << " " << v.rows << " " << v.cols << "\n";
    payload_doubles += v.size();
    table << "vb" << l << " 1 " << state.opt.b_velocity[l].size() << "\n";
    payload_doubles += state.opt.b_velocity[l].size();
  }
  manifest << "arrays: " << (4 * n_layers) << "\n" << table.str();
  manifest << "payload_bytes: " << payload_doubles * sizeof(double) << "\n";
  out << manifest.str();

  for (std::size_t l = 0; l < n_layers; ++l) {
    write_array(out, state.params.weights[l].data);
    write_array(out, state.params.biases[l]);
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    write_array(out, state.opt.w_velocity[l].data);
    write_array(out, state.opt.b_velocity[l]);
  }
  if (!out) throw LoadError(path + ": write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open");

  if (expect_line(in, path) != kHeader)
    throw LoadError(path + ": unsupported format/version");

  Checkpoint ckpt;
  {
    std::istringstream sizes(expect_field(in, path, "layer_sizes").substr(0));
    std::size_t s;
    while (sizes >> s) ckpt.layer_sizes.push_back(s);
    if (ckpt.layer_sizes.size() < 2)
      throw LoadError(path + ": bad layer_sizes");
  }
  ckpt.epoch = std::stoi(expect_field(in, path, "epoch"));
  ckpt.seed = std::stoull(expect_field(in, path, "seed"));
  ckpt.config_hash = std::stoull(expect_field(in, path, "config_hash"), nullptr, 16);
  ckpt.rex_active = expect_field(in, path, "rex_active") == "1";

  const std::size_t n_arrays = std::stoul(expect_field(in, path, "arrays"));
  const std::size_t n_layers = ckpt.layer_sizes.size() - 1;
  if (n_arrays != 4 * n_layers)
    throw LoadError(path + ": array count does not match layer_sizes");

  struct ArrayDecl {
    std::string name;
    std::size_t rows, cols;
  };
  std::vector<ArrayDecl> decls;
  std::size_t payload_doubles = 0;
  for (std::size_t i = 0; i < n_arrays; ++i) {
    std::istringstream line(expect_line(in, path));
    ArrayDecl d;
    if (!(line >> d.name >> d.rows >> d.cols))
      throw LoadError(path + ": bad array declaration");
    payload_doubles += d.rows * d.cols;
    decls.push_back(d);
  }
  const std::size_t declared_bytes = std::stoul(expect_field(in, path, "payload_bytes"));
  if (declared_bytes != payload_doubles * sizeof(double))
    throw LoadError(path + ": payload size does not match array table");

  auto read_array = [&](std::size_t count) {
    std::vector<double> v(count);
    if (!in.read(reinterpret_cast<char*>(v.data()),
                 static_cast<std::streamsize>(count * sizeof(double))))
      throw LoadError(path + ": truncated payload");
    return v;
  };

  ckpt.params.layer_sizes = ckpt.layer_sizes;
  std::size_t decl_index = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const ArrayDecl& wd = decls[decl_index++];
    const ArrayDecl& bd = decls[decl_index++];
    const std::size_t out_dim = ckpt.layer_sizes[l + 1];
    const std::size_t in_dim = ckpt.layer_sizes[l];
    if (wd.rows != out_dim || wd.cols != in_dim || bd.cols != out_dim)
      throw LoadError(path + ": array shapes do not chain with layer_sizes");
    Matrix w(wd.rows, wd.cols);
    w.data = read_array(w.size());
    ckpt.params.weights.push_back(std::move(w));
    ckpt.params.biases.push_back(read_array(bd.cols));
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const ArrayDecl& wd = decls[decl_index++];
    const ArrayDecl& bd = decls[decl_index++];
    Matrix v(wd.rows, wd.cols);
    v.data = read_array(v.size());
    ckpt.w_velocity.push_back(std::move(v));
    ckpt.b_velocity.push_back(read_array(bd.cols));
  }

  // Must be exactly at EOF now.
  char extra;
  if (in.read(&extra, 1))
    throw LoadError(path + ": trailing bytes after payload");
  return ckpt;
}

TrainerState resume_trainer(const Checkpoint& ckpt, OptimState opt,
                            DefenseConfig defense, int batch_size, int workers) {
  if (opt.w_velocity.size() != ckpt.w_velocity.size())
    throw LoadError("resume: optimizer shape does not match checkpoint");
  opt.w_velocity = ckpt.w_velocity;
  opt.b_velocity = ckpt.b_velocity;
  TrainerState state = make_trainer(ckpt.params, std::move(opt),
                                    std::move(defense), ckpt.seed, batch_size,
                                    workers);
  state.epoch = ckpt.epoch;
  if (ckpt.rex_active) {
    state.rex_active = true;
    if (state.defense.mode == DefenseMode::MSD_REX)
      state.active_domains = state.defense.rex_domains;
  }
  return state;
}

}  // namespace advrex
