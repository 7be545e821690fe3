#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicing {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TopologyConfig {
    int grid_width = 40;
    int grid_height = 40;
    double cell_m = 50.0;
    // Empty means the 4-BS quadrant layout.
    std::vector<Point> bs_positions;
    double h0_db = -40.0;
    double ref_distance_m = 2.0;
    double path_loss_exponent = 4.0;
};

// All physical quantities are linear SI once loaded; dB values live only in the file.
struct SimConfig {
    TopologyConfig topology;

    int sp_count = 3;
    int mus_per_sp = 2;
    int channels = 11;

    double bandwidth_hz = 500e3;
    double slot_s = 1e-2;
    double noise_w_per_hz = 3.981071705534973e-21;  // -174 dBm/Hz
    double discount = 0.9;
    double utility_price = 1.0;
    double energy_weight = 3.0;
    double task_bits = 5000.0;
    double packet_bits = 3000.0;
    double cycles_per_bit = 737.5;
    double cpu_hz = 2e9;
    double switched_capacitance = 2.5e-28;
    double max_tx_power_w = 3.0;
    int max_queue = 10;
    int max_tasks = 5;
    double arrival_rate = 8.0;
    // 0 selects 4 * arrival_rate.
    int arrival_cap = 0;
    double mobility_stay = 0.6;

    // DQN
    int replay_size = 5000;
    int batch_size = 200;
    int hidden_width = 16;
    double learning_rate = 1e-3;
    double epsilon = 0.001;
    double epsilon_start = 1.0;
    int epsilon_anneal_slots = 20000;
    int target_sync_period = 100;
    bool share_weights = false;

    // Payment-value learner
    int abstract_states = 5;
    double max_payment = 0.0;  // 0: running max frozen after payment_warmup_slots
    int payment_warmup_slots = 2000;
    double zeta0 = 0.5;
    double zeta_kappa = 1000.0;

    // Baselines
    int queue_threshold = 5;
    double random_valuation_cap = 10.0;

    int mu_count() const { return sp_count * mus_per_sp; }
    int effective_arrival_cap() const;
    void validate() const;

    // The full-size parameter set (6 MUs per SP).
    static SimConfig paper_scale();
};

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_per_hz_to_w_per_hz(double dbm);

// `key = value` lines grouped under `[topology]`, `[env]`, `[learning]`,
// `[sp]`, `[baselines]` sections. Unknown keys are rejected.
SimConfig load_config(std::istream& in);
SimConfig load_config_file(const std::string& path);
void save_config(std::ostream& out, const SimConfig& config);

}  // namespace slicing
