#include "slicing/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

#include <fmt/format.h>

namespace slicing {

namespace pt = boost::property_tree;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_per_hz_to_w_per_hz(double dbm) { return db_to_linear(dbm - 30.0); }

int SimConfig::effective_arrival_cap() const {
    if (arrival_cap > 0) return arrival_cap;
    return std::max(1, static_cast<int>(std::ceil(4.0 * arrival_rate)));
}

SimConfig SimConfig::paper_scale() {
    SimConfig c;
    c.mus_per_sp = 6;
    return c;
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(fmt::format("invalid config: {}", what));
    };
    require(topology.grid_width > 0 && topology.grid_height > 0, "grid dimensions must be positive");
    require(topology.cell_m > 0, "cell_m must be positive");
    require(topology.ref_distance_m > 0, "ref_distance_m must be positive");
    require(sp_count >= 1, "sp_count >= 1");
    require(sp_count <= 16, "sp_count <= 16 (exhaustive winner determination)");
    require(mus_per_sp >= 0, "mus_per_sp >= 0");
    require(channels >= 1, "channels >= 1");
    require(bandwidth_hz > 0 && slot_s > 0 && noise_w_per_hz > 0, "bandwidth, slot and noise must be positive");
    require(discount >= 0 && discount < 1, "discount in [0,1)");
    require(utility_price > 0 && energy_weight > 0, "prices and weights must be positive");
    require(task_bits > 0 && packet_bits > 0, "bit sizes must be positive");
    require(cycles_per_bit > 0 && cpu_hz > 0 && switched_capacitance > 0, "CPU parameters must be positive");
    require(max_tx_power_w > 0, "max_tx_power_w must be positive");
    require(max_queue >= 0 && max_tasks >= 0, "queue/task maxima must be non-negative");
    require(arrival_rate >= 0, "arrival_rate >= 0");
    require(mobility_stay >= 0 && mobility_stay <= 1, "mobility_stay in [0,1]");
    require(replay_size >= 1 && batch_size >= 1, "replay and batch sizes >= 1");
    require(hidden_width >= 1, "hidden_width >= 1");
    require(learning_rate > 0, "learning_rate > 0");
    require(epsilon >= 0 && epsilon <= 1, "epsilon in [0,1]");
    require(epsilon_start >= 0 && epsilon_start <= 1, "epsilon_start in [0,1]");
    require(epsilon_anneal_slots >= 0, "epsilon_anneal_slots >= 0");
    require(target_sync_period >= 1, "target_sync_period >= 1");
    require(abstract_states >= 1, "abstract_states >= 1");
    require(max_payment >= 0, "max_payment >= 0");
    require(zeta0 >= 0 && zeta0 < 1, "zeta0 in [0,1)");
    require(zeta_kappa > 0, "zeta_kappa > 0");
    require(queue_threshold >= 0 && queue_threshold <= max_queue, "queue_threshold in [0, max_queue]");
    require(random_valuation_cap >= 0, "random_valuation_cap >= 0");
}

namespace {

using Field = std::variant<int*, double*, bool*>;

// Noise and H0 are stored linear/dB respectively; they get dedicated handling.
std::map<std::string, Field> bindings(SimConfig& c) {
    return {
        {"topology.grid_width", &c.topology.grid_width},
        {"topology.grid_height", &c.topology.grid_height},
        {"topology.cell_m", &c.topology.cell_m},
        {"topology.h0_db", &c.topology.h0_db},
        {"topology.ref_distance_m", &c.topology.ref_distance_m},
        {"topology.path_loss_exponent", &c.topology.path_loss_exponent},
        {"env.sp_count", &c.sp_count},
        {"env.mus_per_sp", &c.mus_per_sp},
        {"env.channels", &c.channels},
        {"env.bandwidth_hz", &c.bandwidth_hz},
        {"env.slot_s", &c.slot_s},
        {"env.noise_w_per_hz", &c.noise_w_per_hz},
        {"env.discount", &c.discount},
        {"env.utility_price", &c.utility_price},
        {"env.energy_weight", &c.energy_weight},
        {"env.task_bits", &c.task_bits},
        {"env.packet_bits", &c.packet_bits},
        {"env.cycles_per_bit", &c.cycles_per_bit},
        {"env.cpu_hz", &c.cpu_hz},
        {"env.switched_capacitance", &c.switched_capacitance},
        {"env.max_tx_power_w", &c.max_tx_power_w},
        {"env.max_queue", &c.max_queue},
        {"env.max_tasks", &c.max_tasks},
        {"env.arrival_rate", &c.arrival_rate},
        {"env.arrival_cap", &c.arrival_cap},
        {"env.mobility_stay", &c.mobility_stay},
        {"learning.replay_size", &c.replay_size},
        {"learning.batch_size", &c.batch_size},
        {"learning.hidden_width", &c.hidden_width},
        {"learning.learning_rate", &c.learning_rate},
        {"learning.epsilon", &c.epsilon},
        {"learning.epsilon_start", &c.epsilon_start},
        {"learning.epsilon_anneal_slots", &c.epsilon_anneal_slots},
        {"learning.target_sync_period", &c.target_sync_period},
        {"learning.share_weights", &c.share_weights},
        {"sp.abstract_states", &c.abstract_states},
        {"sp.max_payment", &c.max_payment},
        {"sp.payment_warmup_slots", &c.payment_warmup_slots},
        {"sp.zeta0", &c.zeta0},
        {"sp.zeta_kappa", &c.zeta_kappa},
        {"baselines.queue_threshold", &c.queue_threshold},
        {"baselines.random_valuation_cap", &c.random_valuation_cap},
    };
}

std::vector<Point> parse_points(const std::string& text) {
    std::vector<Point> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        Point p;
        char comma = 0;
        std::stringstream is(item);
        if (!(is >> p.x >> comma >> p.y) || comma != ',') {
            throw ConfigError(fmt::format("bad BS coordinate '{}'", item));
        }
        points.push_back(p);
    }
    return points;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
    std::istringstream is(text);
    T value{};
    if constexpr (std::is_same_v<T, bool>) {
        std::string word;
        is >> word;
        if (word == "true" || word == "1") return true;
        if (word == "false" || word == "0") return false;
        throw ConfigError(fmt::format("bad boolean for {}: '{}'", key, text));
    } else {
        is >> value;
        if (!is || !(is >> std::ws).eof()) {
            throw ConfigError(fmt::format("bad value for {}: '{}'", key, text));
        }
    }
    return value;
}

}  // namespace

SimConfig load_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(e.what());
    }
    SimConfig config;
    auto fields = bindings(config);
    for (const auto& [section, values] : tree) {
        if (section == "harness") continue;  // experiment keys, read by load_experiment
        for (const auto& [name, node] : values) {
            const std::string key = section + "." + name;
            const std::string text = node.get_value<std::string>();
            if (key == "topology.bs") {
                config.topology.bs_positions = parse_points(text);
            } else if (key == "env.noise_dbm_per_hz") {
                config.noise_w_per_hz = dbm_per_hz_to_w_per_hz(parse_value<double>(key, text));
            } else if (auto it = fields.find(key); it != fields.end()) {
                std::visit([&](auto* field) {
                    *field = parse_value<std::remove_pointer_t<decltype(field)>>(key, text);
                }, it->second);
            } else {
                throw ConfigError(fmt::format("unknown config key '{}'", key));
            }
        }
    }
    config.validate();
    return config;
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    return load_config(in);
}

void save_config(std::ostream& out, const SimConfig& config) {
    SimConfig copy = config;
    auto fields = bindings(copy);
    std::string current;
    auto emit_section = [&](const std::string& section) {
        if (section == current) return;
        out << (current.empty() ? "" : "\n") << '[' << section << "]\n";
        current = section;
    };
    // std::map orders sections alphabetically; emit topology extras with their section.
    for (const auto& [key, field] : fields) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        emit_section(section);
        std::visit([&](auto* value) {
            using T = std::remove_pointer_t<decltype(value)>;
            if constexpr (std::is_same_v<T, bool>) {
                out << key.substr(dot + 1) << " = " << (*value ? "true" : "false") << '\n';
            } else if constexpr (std::is_same_v<T, int>) {
                out << key.substr(dot + 1) << " = " << *value << '\n';
            } else {
                out << key.substr(dot + 1) << " = " << fmt::format("{:.17g}", *value) << '\n';
            }
        }, field);
        if (key == "topology.ref_distance_m" && !copy.topology.bs_positions.empty()) {
            out << "bs = ";
            for (std::size_t i = 0; i < copy.topology.bs_positions.size(); ++i) {
                const auto& p = copy.topology.bs_positions[i];
                out << (i ? "; " : "") << fmt::format("{:.17g},{:.17g}", p.x, p.y);
            }
            out << '\n';
        }
    }
}

}  // namespace slicing
