#include "dcb/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dcb/errors.hpp"

namespace dcb {

using nlohmann::json;

void RunConfig::validate() const {
    BackboneConfig bc = backbone_config(*this);
    bc.validate();  // extents, patch divisibility, window/step/feature_dim
    if (context_frames < window) {
        throw ConfigError("config: context_frames must be >= window");
    }
    if (horizon <= 0 || horizon % step != 0) {
        throw ConfigError("config: horizon must be a positive multiple of step");
    }
    if (capacity < 0) throw ConfigError("config: capacity must be nonnegative");
    if (capacity != 0 && capacity < rollout_steps()) {
        throw ConfigError("config: capacity " + std::to_string(capacity) +
                          " is smaller than the " + std::to_string(rollout_steps()) +
                          " rollout steps");
    }
    if (lambda_drift < 0.0) throw ConfigError("config: lambda_drift must be nonnegative");
    if (lr < 0.0 || eps <= 0.0) throw ConfigError("config: bad optimizer settings");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("config: betas must lie in [0, 1)");
    }
    if (weight_decay < 0.0) throw ConfigError("config: weight_decay must be nonnegative");
    if (epochs < 0 || batch_size <= 0 || threads <= 0) {
        throw ConfigError("config: epochs/batch_size/threads out of range");
    }
    if (sequences_train <= 0 || sequences_val < 0 || sequences_test < 0) {
        throw ConfigError("config: sequence counts out of range");
    }
    if (run_id.empty()) throw ConfigError("config: run_id must be nonempty");
    advection_config(*this).validate();
}

int RunConfig::rollout_steps() const { return step > 0 ? horizon / step : 0; }

int RunConfig::derived_capacity() const { return capacity == 0 ? rollout_steps() : capacity; }

namespace {

const char* to_string(VelocityMode m) {
    return m == VelocityMode::kConstant ? "constant" : "rotating";
}

VelocityMode parse_velocity_mode(const std::string& s) {
    if (s == "constant") return VelocityMode::kConstant;
    if (s == "rotating") return VelocityMode::kRotating;
    throw ConfigError("config: unknown velocity_mode '" + s + "'");
}

json to_json(const RunConfig& c) {
    json j;
    j["height"] = c.height;
    j["width"] = c.width;
    j["context_frames"] = c.context_frames;
    j["horizon"] = c.horizon;
    j["window"] = c.window;
    j["step"] = c.step;
    j["feature_dim"] = c.feature_dim;
    j["patch"] = c.patch;
    j["capacity"] = c.capacity;
    j["lambda_drift"] = c.lambda_drift;
    j["mode"] = dcb::to_string(c.mode);
    j["fallback_on_empty"] = c.fallback_on_empty;
    j["lr"] = c.lr;
    j["beta1"] = c.beta1;
    j["beta2"] = c.beta2;
    j["eps"] = c.eps;
    j["weight_decay"] = c.weight_decay;
    j["clip_norm"] = c.clip_norm;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    j["sequences_train"] = c.sequences_train;
    j["sequences_val"] = c.sequences_val;
    j["sequences_test"] = c.sequences_test;
    j["n_blobs"] = c.n_blobs;
    j["sigma_min"] = c.sigma_min;
    j["sigma_max"] = c.sigma_max;
    j["speed_min"] = c.speed_min;
    j["speed_max"] = c.speed_max;
    j["rotation_min"] = c.rotation_min;
    j["rotation_max"] = c.rotation_max;
    j["amplitude_min"] = c.amplitude_min;
    j["amplitude_max"] = c.amplitude_max;
    j["growth_min"] = c.growth_min;
    j["growth_max"] = c.growth_max;
    j["noise_std"] = c.noise_std;
    j["velocity_mode"] = to_string(c.velocity_mode);
    j["velocity_x"] = c.velocity_x;
    j["velocity_y"] = c.velocity_y;
    j["grid_aligned_centers"] = c.grid_aligned_centers;
    j["run_id"] = c.run_id;
    return j;
}

RunConfig from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    RunConfig c;
    const json known = to_json(c);
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError("config: unknown key '" + key + "'");
    }

    try {
        c.height = j.value("height", c.height);
        c.width = j.value("width", c.width);
        c.context_frames = j.value("context_frames", c.context_frames);
        c.horizon = j.value("horizon", c.horizon);
        c.window = j.value("window", c.window);
        c.step = j.value("step", c.step);
        c.feature_dim = j.value("feature_dim", c.feature_dim);
        c.patch = j.value("patch", c.patch);
        c.capacity = j.value("capacity", c.capacity);
        c.lambda_drift = j.value("lambda_drift", c.lambda_drift);
        if (j.contains("mode")) {
            const std::string name = j["mode"].get<std::string>();
            const auto mode = parse_mode(name);
            if (!mode) throw ConfigError("config: unknown mode '" + name + "'");
            c.mode = *mode;
        }
        c.fallback_on_empty = j.value("fallback_on_empty", c.fallback_on_empty);
        c.lr = j.value("lr", c.lr);
        c.beta1 = j.value("beta1", c.beta1);
        c.beta2 = j.value("beta2", c.beta2);
        c.eps = j.value("eps", c.eps);
        c.weight_decay = j.value("weight_decay", c.weight_decay);
        c.clip_norm = j.value("clip_norm", c.clip_norm);
        c.epochs = j.value("epochs", c.epochs);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.threads = j.value("threads", c.threads);
        c.seed = j.value("seed", c.seed);
        c.sequences_train = j.value("sequences_train", c.sequences_train);
        c.sequences_val = j.value("sequences_val", c.sequences_val);
        c.sequences_test = j.value("sequences_test", c.sequences_test);
        c.n_blobs = j.value("n_blobs", c.n_blobs);
        c.sigma_min = j.value("sigma_min", c.sigma_min);
        c.sigma_max = j.value("sigma_max", c.sigma_max);
        c.speed_min = j.value("speed_min", c.speed_min);
        c.speed_max = j.value("speed_max", c.speed_max);
        c.rotation_min = j.value("rotation_min", c.rotation_min);
        c.rotation_max = j.value("rotation_max", c.rotation_max);
        c.amplitude_min = j.value("amplitude_min", c.amplitude_min);
        c.amplitude_max = j.value("amplitude_max", c.amplitude_max);
        c.growth_min = j.value("growth_min", c.growth_min);
        c.growth_max = j.value("growth_max", c.growth_max);
        c.noise_std = j.value("noise_std", c.noise_std);
        if (j.contains("velocity_mode")) {
            c.velocity_mode = parse_velocity_mode(j["velocity_mode"].get<std::string>());
        }
        c.velocity_x = j.value("velocity_x", c.velocity_x);
        c.velocity_y = j.value("velocity_y", c.velocity_y);
        c.grid_aligned_centers = j.value("grid_aligned_centers", c.grid_aligned_centers);
        c.run_id = j.value("run_id", c.run_id);
    } catch (const json::type_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    c.validate();
    return c;
}

}  // namespace

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_string(buf.str());
}

RunConfig RunConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return from_json(j);
}

std::string RunConfig::to_json_string() const { return to_json(*this).dump(); }

BackboneConfig backbone_config(const RunConfig& cfg) {
    BackboneConfig bc;
    bc.height = cfg.height;
    bc.width = cfg.width;
    bc.patch = cfg.patch;
    bc.window = cfg.window;
    bc.step = cfg.step;
    bc.feature_dim = cfg.feature_dim;
    return bc;
}

AdvectionConfig advection_config(const RunConfig& cfg) {
    AdvectionConfig ac;
    ac.height = cfg.height;
    ac.width = cfg.width;
    ac.length = cfg.context_frames + cfg.horizon;
    ac.n_blobs = cfg.n_blobs;
    ac.velocity_mode = cfg.velocity_mode;
    ac.velocity_x = cfg.velocity_x;
    ac.velocity_y = cfg.velocity_y;
    ac.speed_min = cfg.speed_min;
    ac.speed_max = cfg.speed_max;
    ac.rotation_min = cfg.rotation_min;
    ac.rotation_max = cfg.rotation_max;
    ac.sigma_min = cfg.sigma_min;
    ac.sigma_max = cfg.sigma_max;
    ac.amplitude_min = cfg.amplitude_min;
    ac.amplitude_max = cfg.amplitude_max;
    ac.growth_min = cfg.growth_min;
    ac.growth_max = cfg.growth_max;
    ac.noise_std = cfg.noise_std;
    ac.grid_aligned_centers = cfg.grid_aligned_centers;
    ac.seed = cfg.seed;
    return ac;
}

ModelDims model_dims(const RunConfig& cfg) {
    ModelDims d;
    d.feature_dim = cfg.feature_dim;
    d.encode_cols = cfg.patch * cfg.patch * cfg.window;
    d.decode_cols = cfg.patch * cfg.patch * cfg.step;
    d.capacity = cfg.derived_capacity();
    return d;
}

DcbankOptions dcbank_options(const RunConfig& cfg) {
    DcbankOptions opt;
    opt.mode = cfg.mode;
    opt.fallback_on_empty = cfg.fallback_on_empty;
    return opt;
}

ModelParams init_model(const RunConfig& cfg) {
    ModelParams p = init_params(model_dims(cfg), cfg.seed);
    p.dcbank.camr.lambda_drift = cfg.lambda_drift;
    return p;
}

}  // namespace dcb
