#include "rlscape/io/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace rlscape {

namespace {

constexpr std::array<std::uint8_t, 8> kMagic = {'R', 'L', 'S', 'C', 'K', 'P', 'T', '1'};

// Reflected CRC-32 (polynomial 0xEDB88320), table-driven.
const std::array<std::uint32_t, 256>& crc_table() {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    return table;
}

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    void f64_vec(const std::vector<double>& xs) {
        u64(xs.size());
        for (const double x : xs) f64(x);
    }

    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        const auto b = take(n);
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }
    std::vector<double> f64_vec() {
        const std::uint64_t n = u64();
        if (n > bytes_.size() / 8)
            throw CheckpointError("checkpoint corrupt: array length exceeds file size");
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (double& x : xs) x = f64();
        return xs;
    }
    std::size_t remaining() const { return bytes_.size(); }

private:
    std::span<const std::uint8_t> take(std::size_t n) {
        if (bytes_.size() < n) throw CheckpointError("checkpoint corrupt: truncated file");
        const auto out = bytes_.first(n);
        bytes_ = bytes_.subspan(n);
        return out;
    }

    std::span<const std::uint8_t> bytes_;
};

void write_shape(ByteWriter& w, const MlpShape& shape) {
    w.u32(static_cast<std::uint32_t>(shape.input_dim));
    w.u32(static_cast<std::uint32_t>(shape.output_dim));
    w.u32(static_cast<std::uint32_t>(shape.hidden.size()));
    for (const int h : shape.hidden) w.u32(static_cast<std::uint32_t>(h));
    w.u8(shape.output == OutputKind::TanhScaled ? 0 : 1);
    w.f64(shape.output_scale);
}

MlpShape read_shape(ByteReader& r) {
    MlpShape shape;
    shape.input_dim = static_cast<int>(r.u32());
    shape.output_dim = static_cast<int>(r.u32());
    const std::uint32_t n_hidden = r.u32();
    if (n_hidden > 64) throw CheckpointError("checkpoint corrupt: implausible layer count");
    shape.hidden.resize(n_hidden);
    for (int& h : shape.hidden) h = static_cast<int>(r.u32());
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw CheckpointError("checkpoint corrupt: unknown output kind");
    shape.output = kind == 0 ? OutputKind::TanhScaled : OutputKind::Linear;
    shape.output_scale = r.f64();
    return shape;
}

void write_params(ByteWriter& w, const ParamVector& p) {
    write_shape(w, p.shape);
    w.f64_vec(p.values);
}

ParamVector read_params(ByteReader& r) {
    ParamVector p;
    p.shape = read_shape(r);
    p.values = r.f64_vec();
    if (p.values.size() != p.shape.param_count())
        throw CheckpointError("checkpoint corrupt: parameter count does not match shape");
    return p;
}

void write_adam(ByteWriter& w, const AdamState& a) {
    w.f64_vec(a.m);
    w.f64_vec(a.v);
    w.i64(a.t);
}

AdamState read_adam(ByteReader& r) {
    AdamState a;
    a.m = r.f64_vec();
    a.v = r.f64_vec();
    a.t = r.i64();
    return a;
}

void write_env(ByteWriter& w, const EnvSpec& env) {
    w.str(env.name);
    w.u8(static_cast<std::uint8_t>(env.kind));
    w.u32(static_cast<std::uint32_t>(env.state_dim));
    w.u32(static_cast<std::uint32_t>(env.action_dim));
    w.u32(static_cast<std::uint32_t>(env.horizon));
    w.f64_vec(env.init_ref);
    w.f64_vec(env.init_halfwidth);
    w.f64(env.action_bound);
    w.f64(env.reward_min);
    w.f64(env.reward_max);
}

EnvSpec read_env(ByteReader& r) {
    EnvSpec env;
    env.name = r.str();
    const std::uint8_t kind = r.u8();
    if (kind > 2) throw CheckpointError("checkpoint corrupt: unknown environment kind");
    env.kind = static_cast<EnvKind>(kind);
    env.state_dim = static_cast<int>(r.u32());
    env.action_dim = static_cast<int>(r.u32());
    env.horizon = static_cast<int>(r.u32());
    env.init_ref = r.f64_vec();
    env.init_halfwidth = r.f64_vec();
    env.action_bound = r.f64();
    env.reward_min = r.f64();
    env.reward_max = r.f64();
    return env;
}

void write_td3_config(ByteWriter& w, const Td3Config& c) {
    w.i64(c.total_steps);
    w.i64(c.warmup_steps);
    w.u32(static_cast<std::uint32_t>(c.batch_size));
    w.u64(c.buffer_capacity);
    w.f64(c.discount);
    w.f64(c.adam.lr);
    w.f64(c.adam.beta1);
    w.f64(c.adam.beta2);
    w.f64(c.adam.eps);
    w.f64(c.tau);
    w.f64(c.exploration_noise);
    w.u32(static_cast<std::uint32_t>(c.actor_delay));
    w.f64(c.policy_noise);
    w.f64(c.noise_clip);
    w.u32(static_cast<std::uint32_t>(c.hidden_units));
    w.u32(static_cast<std::uint32_t>(c.hidden_layers));
    w.u32(static_cast<std::uint32_t>(c.n_checkpoints));
}

Td3Config read_td3_config(ByteReader& r) {
    Td3Config c;
    c.total_steps = r.i64();
    c.warmup_steps = r.i64();
    c.batch_size = static_cast<int>(r.u32());
    c.buffer_capacity = static_cast<std::size_t>(r.u64());
    c.discount = r.f64();
    c.adam.lr = r.f64();
    c.adam.beta1 = r.f64();
    c.adam.beta2 = r.f64();
    c.adam.eps = r.f64();
    c.tau = r.f64();
    c.exploration_noise = r.f64();
    c.actor_delay = static_cast<int>(r.u32());
    c.policy_noise = r.f64();
    c.noise_clip = r.f64();
    c.hidden_units = static_cast<int>(r.u32());
    c.hidden_layers = static_cast<int>(r.u32());
    c.n_checkpoints = static_cast<int>(r.u32());
    return c;
}

void write_env_state(ByteWriter& w, const EnvState& s) {
    w.f64_vec(s.s);
    w.u32(static_cast<std::uint32_t>(s.t));
    w.u8(s.terminated ? 1 : 0);
}

EnvState read_env_state(ByteReader& r) {
    EnvState s;
    s.s = r.f64_vec();
    s.t = static_cast<int>(r.u32());
    s.terminated = r.u8() != 0;
    return s;
}

void write_buffer(ByteWriter& w, const ReplayBuffer& b) {
    w.u64(b.capacity());
    w.u64(b.write_pos());
    w.u64(b.insert_count());
    const std::vector<Transition>& data = b.raw();
    w.u64(data.size());
    for (const Transition& t : data) {
        w.f64_vec(t.s);
        w.f64_vec(t.a);
        w.f64(t.r);
        w.f64_vec(t.s2);
        w.u8(t.terminal ? 1 : 0);
    }
}

ReplayBuffer read_buffer(ByteReader& r) {
    const std::uint64_t capacity = r.u64();
    const std::uint64_t next = r.u64();
    const std::uint64_t insert_count = r.u64();
    const std::uint64_t count = r.u64();
    if (count > capacity || next >= std::max<std::uint64_t>(capacity, 1))
        throw CheckpointError("checkpoint corrupt: replay buffer cursor out of range");
    ReplayBuffer b(static_cast<std::size_t>(capacity));
    std::vector<Transition> data(static_cast<std::size_t>(count));
    for (Transition& t : data) {
        t.s = r.f64_vec();
        t.a = r.f64_vec();
        t.r = r.f64();
        t.s2 = r.f64_vec();
        t.terminal = r.u8() != 0;
    }
    b.restore_raw(std::move(data), static_cast<std::size_t>(next), insert_count);
    return b;
}

void write_full_state(ByteWriter& w, const Td3State& st) {
    write_env(w, st.env);
    write_td3_config(w, st.config);
    w.u64(st.run_seed);
    write_params(w, st.actor);
    write_params(w, st.critic1);
    write_params(w, st.critic2);
    write_params(w, st.target_actor);
    write_params(w, st.target_critic1);
    write_params(w, st.target_critic2);
    write_adam(w, st.actor_opt);
    write_adam(w, st.critic1_opt);
    write_adam(w, st.critic2_opt);
    write_buffer(w, st.buffer);
    write_env_state(w, st.cursor);
    w.i64(st.interaction_count);
    w.i64(st.update_count);
    w.i64(st.actor_update_count);
    w.i64(st.episode_count);
}

Td3State read_full_state(ByteReader& r) {
    Td3State st;
    st.env = read_env(r);
    st.config = read_td3_config(r);
    st.run_seed = r.u64();
    st.actor = read_params(r);
    st.critic1 = read_params(r);
    st.critic2 = read_params(r);
    st.target_actor = read_params(r);
    st.target_critic1 = read_params(r);
    st.target_critic2 = read_params(r);
    st.actor_opt = read_adam(r);
    st.critic1_opt = read_adam(r);
    st.critic2_opt = read_adam(r);
    st.buffer = read_buffer(r);
    st.cursor = read_env_state(r);
    st.interaction_count = r.i64();
    st.update_count = r.i64();
    st.actor_update_count = r.i64();
    st.episode_count = r.i64();
    st.stream_salt = 0;
    return st;
}

}  // namespace

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
    const auto& table = crc_table();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (const std::uint8_t b : bytes) crc = table[(crc ^ b) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
    ByteWriter w;
    for (const std::uint8_t b : kMagic) w.u8(b);
    w.u32(kCheckpointFormatVersion);
    w.str(ckpt.env_name);
    w.u64(ckpt.seed);
    w.u64(ckpt.config_hash);
    w.i64(ckpt.step);
    write_params(w, ckpt.actor);
    w.u8(ckpt.full ? 1 : 0);
    if (ckpt.full) write_full_state(w, *ckpt.full);
    std::vector<std::uint8_t> bytes = w.take();
    const std::uint32_t crc = crc32_of(bytes);
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
    return bytes;
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kMagic.size() + 8)
        throw CheckpointError("checkpoint corrupt: file shorter than header");
    std::uint32_t stored_crc = 0;
    for (int i = 0; i < 4; ++i)
        stored_crc |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + i]) << (8 * i);
    const auto payload = bytes.first(bytes.size() - 4);
    if (crc32_of(payload) != stored_crc)
        throw CheckpointError("checkpoint corrupt: checksum mismatch");

    ByteReader r(payload);
    for (const std::uint8_t expected : kMagic) {
        if (r.u8() != expected) throw CheckpointError("not a checkpoint file: bad magic");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointFormatVersion)
        throw CheckpointError("unsupported checkpoint format version " + std::to_string(version) +
                              " (expected " + std::to_string(kCheckpointFormatVersion) + ")");
    Checkpoint ckpt;
    ckpt.env_name = r.str();
    ckpt.seed = r.u64();
    ckpt.config_hash = r.u64();
    ckpt.step = r.i64();
    ckpt.actor = read_params(r);
    const bool has_full = r.u8() != 0;
    if (has_full) ckpt.full = std::make_shared<const Td3State>(read_full_state(r));
    if (r.remaining() != 0)
        throw CheckpointError("checkpoint corrupt: trailing bytes after payload");
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const std::vector<std::uint8_t> bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint file: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

void require_shape(const Checkpoint& ckpt, const MlpShape& expected) {
    if (ckpt.actor.shape == expected) return;
    const auto describe = [](const MlpShape& s) {
        std::ostringstream out;
        out << s.input_dim << "->[";
        for (std::size_t i = 0; i < s.hidden.size(); ++i) {
            if (i) out << ",";
            out << s.hidden[i];
        }
        out << "]->" << s.output_dim;
        return out.str();
    };
    throw CheckpointError("checkpoint actor architecture " + describe(ckpt.actor.shape) +
                          " does not match the configured architecture " + describe(expected));
}

std::string checkpoint_debug_json(const Checkpoint& ckpt) {
    nlohmann::json j;
    j["env"] = ckpt.env_name;
    j["seed"] = ckpt.seed;
    j["config_hash"] = ckpt.config_hash;
    j["step"] = ckpt.step;
    j["id"] = ckpt.id();
    j["actor"] = {{"input_dim", ckpt.actor.shape.input_dim},
                  {"output_dim", ckpt.actor.shape.output_dim},
                  {"hidden", ckpt.actor.shape.hidden},
                  {"params", ckpt.actor.values.size()}};
    j["has_full_state"] = static_cast<bool>(ckpt.full);
    if (ckpt.full) {
        const Td3State& st = *ckpt.full;
        j["full"] = {{"interaction_count", st.interaction_count},
                     {"update_count", st.update_count},
                     {"actor_update_count", st.actor_update_count},
                     {"episode_count", st.episode_count},
                     {"buffer_size", st.buffer.size()},
                     {"buffer_capacity", st.buffer.capacity()}};
    }
    return j.dump(2) + "\n";
}

}  // namespace rlscape
