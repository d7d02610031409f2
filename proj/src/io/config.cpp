#include "harpy/io/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "harpy/io/format.hpp"

namespace harpy::io {

namespace {

using kinematics::RobotMorphology;
using kinematics::Side;
using math::Mat3;
using math::Vec3;
using sim::Scenario;

/// Wrong shape or type of a YAML value.
struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int line_of(const YAML::Node& n)
{
    const YAML::Mark m = n.Mark();
    return m.line >= 0 ? m.line + 1 : 0;
}

double read_double(const YAML::Node& n)
{
    if (!n.IsScalar()) {
        throw TypeError("expected a number");
    }
    const std::string& s = n.Scalar();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) {
        return v;
    }
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        throw TypeError("expected a number, got '" + s + "'");
    }
}

YAML::Node write_double(double v)
{
    return YAML::Node(format_double(v));
}

template <int N>
Eigen::Matrix<double, N, 1> read_vector(const YAML::Node& n)
{
    if (!n.IsSequence() || n.size() != N) {
        throw TypeError("expected a list of " + std::to_string(N) + " numbers");
    }
    Eigen::Matrix<double, N, 1> v;
    for (int i = 0; i < N; ++i) {
        v[i] = read_double(n[i]);
    }
    return v;
}

template <class V>
YAML::Node write_vector(const V& v)
{
    YAML::Node n(YAML::NodeType::Sequence);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        n.push_back(write_double(v[i]));
    }
    n.SetStyle(YAML::EmitterStyle::Flow);
    return n;
}

/// Either a 3-list (principal moments) or a 3×3 nested list.
Mat3 read_inertia(const YAML::Node& n)
{
    if (n.IsSequence() && n.size() == 3 && n[0].IsScalar()) {
        return read_vector<3>(n).asDiagonal();
    }
    if (!n.IsSequence() || n.size() != 3) {
        throw TypeError("expected 3 principal moments or a 3x3 matrix");
    }
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
        m.row(r) = read_vector<3>(n[r]).transpose();
    }
    return m;
}

YAML::Node write_inertia(const Mat3& m)
{
    YAML::Node n(YAML::NodeType::Sequence);
    for (int r = 0; r < 3; ++r) {
        n.push_back(write_vector(Vec3(m.row(r).transpose())));
    }
    return n;
}

bool read_bool(const YAML::Node& n)
{
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        throw TypeError("expected true or false");
    }
}

std::string read_string(const YAML::Node& n)
{
    if (!n.IsScalar()) {
        throw TypeError("expected a string");
    }
    return n.Scalar();
}

Side read_side(const YAML::Node& n)
{
    const std::string s = read_string(n);
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    throw TypeError("expected 'left' or 'right', got '" + s + "'");
}

sim::Plant read_plant(const YAML::Node& n)
{
    const std::string s = read_string(n);
    if (s == "vlip") return sim::Plant::vlip;
    if (s == "full_order" || s == "full-order") return sim::Plant::full_order;
    throw TypeError("expected 'vlip' or 'full_order', got '" + s + "'");
}

std::uint64_t read_seed(const YAML::Node& n)
{
    try {
        return n.as<std::uint64_t>();
    } catch (const YAML::Exception&) {
        throw TypeError("expected a non-negative integer");
    }
}

template <class T>
struct Field {
    std::string key;
    std::function<void(T&, const YAML::Node&)> read;
    std::function<YAML::Node(const T&)> write;
};

template <class T>
using Fields = std::vector<Field<T>>;

template <class T>
Field<T> number(const char* key, double T::*m)
{
    return {key, [m](T& t, const YAML::Node& n) { t.*m = read_double(n); },
            [m](const T& t) { return write_double(t.*m); }};
}

template <class T, int N>
Field<T> vector(const char* key, Eigen::Matrix<double, N, 1> T::*m)
{
    return {key, [m](T& t, const YAML::Node& n) { t.*m = read_vector<N>(n); },
            [m](const T& t) { return write_vector(t.*m); }};
}

template <class T>
Field<T> inertia(const char* key, Mat3 T::*m)
{
    return {key, [m](T& t, const YAML::Node& n) { t.*m = read_inertia(n); },
            [m](const T& t) { return write_inertia(t.*m); }};
}

const Fields<RobotMorphology>& morphology_fields()
{
    using M = RobotMorphology;
    static const Fields<M> f{
        vector("l1_B", &M::l1_body),   vector("l2_P", &M::l2_pelvis), vector("l3_H", &M::l3_hip),
        number("l4a", &M::l4a),        number("l4b", &M::l4b),        vector("lt_B", &M::lt_body),
        number("m_B", &M::m_body),     number("m_H", &M::m_hip),      number("m_K", &M::m_knee),
        inertia("I_B", &M::inertia_body), inertia("I_H", &M::inertia_hip),
        inertia("I_K", &M::inertia_knee), number("g", &M::gravity),
    };
    return f;
}

const Fields<contact::GroundModelParams>& ground_fields()
{
    using G = contact::GroundModelParams;
    static const Fields<G> f{
        number("k_gp", &G::k_gp), number("k_gd", &G::k_gd), number("mu_c", &G::mu_c),
        number("mu_s", &G::mu_s), number("mu_v", &G::mu_v), number("v_s", &G::v_s),
    };
    return f;
}

const Fields<vlip::GaitConfig>& gait_fields()
{
    using G = vlip::GaitConfig;
    static const Fields<G> f{
        number("z0", &G::z0),
        number("step_period", &G::step_period),
        number("step_width", &G::step_width),
        number("desired_speed", &G::desired_speed),
        number("max_step_length", &G::max_step_length),
        number("max_step_width", &G::max_step_width),
        number("min_foot_separation", &G::min_foot_separation),
        number("thrust_fraction", &G::thrust_fraction),
        number("max_thrust_fraction", &G::max_thrust_fraction),
        number("early_step_energy", &G::early_step_energy),
        number("min_stance_time", &G::min_stance_time),
        number("airborne_grace", &G::airborne_grace),
        number("apex_height", &G::apex_height),
        number("touchdown_depth", &G::touchdown_depth),
    };
    return f;
}

const Fields<sim::ControllerGains>& controller_fields()
{
    using C = sim::ControllerGains;
    static const Fields<C> f{
        number("stance_frontal_kp", &C::stance_frontal_kp),
        number("stance_frontal_kd", &C::stance_frontal_kd),
        number("stance_sagittal_kp", &C::stance_sagittal_kp),
        number("stance_sagittal_kd", &C::stance_sagittal_kd),
        number("swing_hip_kp", &C::swing_hip_kp),
        number("swing_hip_kd", &C::swing_hip_kd),
        number("knee_kp", &C::knee_kp),
        number("knee_kd", &C::knee_kd),
        number("attitude_kp", &C::attitude_kp),
        number("attitude_kd", &C::attitude_kd),
        number("stand_kp", &C::stand_kp),
        number("stand_kd", &C::stand_kd),
        number("max_thrust", &C::max_thrust),
        number("stand_shift", &C::stand_shift),
        number("shift_duration", &C::shift_duration),
        number("settle_time", &C::settle_time),
    };
    return f;
}

const Fields<sim::InitialCondition>& initial_fields()
{
    using I = sim::InitialCondition;
    static const Fields<I> f{
        vector("com_xy", &I::com_xy),
        vector("com_velocity_xy", &I::com_velocity_xy),
        {"stance", [](I& t, const YAML::Node& n) { t.stance = read_side(n); },
         [](const I& t) { return YAML::Node(std::string(kinematics::to_string(t.stance))); }},
        vector("stance_foot_xy", &I::stance_foot_xy),
        number("drop_height", &I::drop_height),
        number("stance_width", &I::stance_width),
        number("velocity_noise", &I::velocity_noise),
    };
    return f;
}

const Fields<sim::Disturbance>& disturbance_fields()
{
    using D = sim::Disturbance;
    static const Fields<D> f{number("time", &D::time), vector("impulse", &D::impulse)};
    return f;
}

/// Applies a map of known keys onto target; reports unknown keys and type errors.
template <class T>
void apply_map(const YAML::Node& node, const Fields<T>& fields, const std::string& path, T& target,
               std::vector<ConfigIssue>& issues, std::map<std::string, ConfigIssue>* origins = nullptr,
               const std::string& origin_prefix = "")
{
    if (!node || node.IsNull()) {
        return;
    }
    if (!node.IsMap()) {
        issues.push_back({path, line_of(node), "expected a mapping"});
        return;
    }
    for (const auto& kv : node) {
        const std::string key = kv.first.Scalar();
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [&](const Field<T>& f) { return f.key == key; });
        const std::string key_path = path + "." + key;
        if (it == fields.end()) {
            std::string known;
            for (const Field<T>& f : fields) {
                known += (known.empty() ? "" : ", ") + f.key;
            }
            issues.push_back({key_path, line_of(kv.first), "unknown key (expected one of: " + known + ")"});
            continue;
        }
        try {
            it->read(target, kv.second);
            if (origins != nullptr) {
                (*origins)[origin_prefix + key] = {key_path, line_of(kv.first), ""};
            }
        } catch (const TypeError& e) {
            issues.push_back({key_path, line_of(kv.second), e.what()});
        }
    }
}

template <class T>
YAML::Node write_map(const T& value, const Fields<T>& fields)
{
    YAML::Node n(YAML::NodeType::Map);
    for (const Field<T>& f : fields) {
        n[f.key] = f.write(value);
    }
    return n;
}

std::string strip_key(const std::string& what, const std::string& key)
{
    const std::string prefix = key + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

/// Reports every violation of T::validate() by resetting each offending
/// field to its default and retrying.
template <class T, class Error, class Validate>
void check_section(T value, const Fields<T>& fields, const std::string& section,
                   const std::string& fallback_path, const std::map<std::string, ConfigIssue>& origins,
                   std::vector<ConfigIssue>& issues, Validate validate)
{
    const T defaults{};
    for (std::size_t attempt = 0; attempt <= fields.size(); ++attempt) {
        try {
            validate(value);
            return;
        } catch (const Error& e) {
            const std::string key = e.key();
            const std::string field_key = key.substr(0, key.find('.'));
            const auto origin = origins.find(section + "." + field_key);
            ConfigIssue issue{fallback_path + "." + key, 0, strip_key(e.what(), key)};
            if (origin != origins.end()) {
                issue.key = origin->second.key + key.substr(field_key.size());
                issue.line = origin->second.line;
            }
            if (std::find(issues.begin(), issues.end(), issue) == issues.end()) {
                issues.push_back(issue);
            }
            const auto f = std::find_if(fields.begin(), fields.end(),
                                        [&](const Field<T>& x) { return x.key == field_key; });
            if (f == fields.end()) {
                return;
            }
            f->read(value, f->write(defaults));
        } catch (const std::exception& e) {
            issues.push_back({fallback_path, 0, e.what()});
            return;
        }
    }
}

/// Scenario-level keys besides the section overrides.
const std::vector<std::string>& scenario_keys()
{
    static const std::vector<std::string> k{"name",     "plant",   "duration",     "dt",
                                            "control_rate", "log_rate", "seed", "poincare_threshold",
                                            "walking",  "initial", "disturbances", "morphology",
                                            "ground",   "gait",    "controller"};
    return k;
}

const Fields<Scenario>& scenario_own_fields()
{
    static const Fields<Scenario> f{
        {"name", [](Scenario& s, const YAML::Node& n) { s.name = read_string(n); },
         [](const Scenario& s) { return YAML::Node(s.name); }},
        {"plant", [](Scenario& s, const YAML::Node& n) { s.plant = read_plant(n); },
         [](const Scenario& s) { return YAML::Node(std::string(sim::to_string(s.plant))); }},
        number("duration", &Scenario::duration),
        number("dt", &Scenario::dt),
        number("control_rate", &Scenario::control_rate),
        number("log_rate", &Scenario::log_rate),
        {"seed", [](Scenario& s, const YAML::Node& n) { s.seed = read_seed(n); },
         [](const Scenario& s) { return YAML::Node(std::to_string(s.seed)); }},
        number("poincare_threshold", &Scenario::poincare_threshold),
        {"walking", [](Scenario& s, const YAML::Node& n) { s.walking = read_bool(n); },
         [](const Scenario& s) { return YAML::Node(s.walking ? "true" : "false"); }},
        {"initial",
         [](Scenario& s, const YAML::Node& n) {
             std::vector<ConfigIssue> local;
             sim::InitialCondition init;
             apply_map(n, initial_fields(), "initial", init, local);
             if (!local.empty()) {
                 throw TypeError(local.front().key + ": " + local.front().message);
             }
             s.initial = init;
         },
         [](const Scenario& s) { return write_map(s.initial, initial_fields()); }},
        {"disturbances",
         [](Scenario& s, const YAML::Node& n) {
             if (!n.IsNull() && !n.IsSequence()) {
                 throw TypeError("expected a list of {time, impulse}");
             }
             std::vector<sim::Disturbance> out;
             for (const auto& item : n) {
                 std::vector<ConfigIssue> local;
                 sim::Disturbance d;
                 apply_map(item, disturbance_fields(), "disturbances", d, local);
                 if (!local.empty()) {
                     throw TypeError(local.front().key + ": " + local.front().message);
                 }
                 out.push_back(d);
             }
             s.disturbances = out;
         },
         [](const Scenario& s) {
             YAML::Node n(YAML::NodeType::Sequence);
             for (const sim::Disturbance& d : s.disturbances) {
                 n.push_back(write_map(d, disturbance_fields()));
             }
             return n;
         }},
    };
    return f;
}

/// Shared sections as decoded so far.
struct Sections {
    RobotMorphology morphology;
    contact::GroundModelParams ground;
    vlip::GaitConfig gait;
    sim::ControllerGains gains;
    std::map<std::string, ConfigIssue> origins;  // "gait.z0" -> where it was set
};

void apply_sections(const YAML::Node& node, const std::string& path, Sections& s,
                    std::vector<ConfigIssue>& issues)
{
    auto at = [&](const char* name) { return path.empty() ? std::string(name) : path + "." + name; };
    apply_map(node["morphology"], morphology_fields(), at("morphology"), s.morphology, issues,
              &s.origins, "morphology.");
    apply_map(node["ground"], ground_fields(), at("ground"), s.ground, issues, &s.origins, "ground.");
    apply_map(node["gait"], gait_fields(), at("gait"), s.gait, issues, &s.origins, "gait.");
    apply_map(node["controller"], controller_fields(), at("controller"), s.gains, issues, &s.origins,
              "controller.");
}

struct Parsed {
    std::vector<Scenario> scenarios;
    std::vector<ConfigIssue> issues;
};

void check_scenario(const Scenario& sc, const Sections& s, const std::string& path,
                    std::vector<ConfigIssue>& issues)
{
    check_section<RobotMorphology, kinematics::InvalidMorphology>(
        sc.morphology, morphology_fields(), "morphology", "morphology", s.origins, issues,
        [](const RobotMorphology& m) { m.validate(); });
    check_section<contact::GroundModelParams, contact::InvalidGroundParams>(
        sc.ground, ground_fields(), "ground", "ground", s.origins, issues,
        [](const contact::GroundModelParams& g) { g.validate(); });
    check_section<vlip::GaitConfig, vlip::InvalidGaitConfig>(
        sc.gait, gait_fields(), "gait", "gait", s.origins, issues,
        [](const vlip::GaitConfig& g) { g.validate(); });
    check_section<sim::ControllerGains, sim::InvalidGains>(
        sc.gains, controller_fields(), "controller", "controller", s.origins, issues,
        [](const sim::ControllerGains& g) { g.validate(); });
    check_section<Scenario, sim::InvalidScenario>(
        sc, scenario_own_fields(), "scenario", path, s.origins, issues,
        [](const Scenario& x) { x.validate_fields(); });

    if (sc.plant == sim::Plant::full_order) {
        const double mass = sc.morphology.total_mass();
        const double thrust = sc.gait.commanded_thrust(mass, sc.morphology.gravity);
        if (thrust > 2.0 * sc.gains.max_thrust) {
            const auto o = s.origins.find("controller.max_thrust");
            issues.push_back({o != s.origins.end() ? o->second.key : "controller.max_thrust",
                              o != s.origins.end() ? o->second.line : 0,
                              "two thrusters at max_thrust cannot supply the commanded vertical thrust " +
                                  format_double(thrust) + " N"});
        }
    }
}

Parsed parse_document(const std::string& text)
{
    Parsed out;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        out.issues.push_back({"", e.mark.line + 1, e.msg});
        return out;
    }
    if (!root.IsMap()) {
        out.issues.push_back({"", line_of(root), "document must be a mapping"});
        return out;
    }
    static const std::vector<std::string> top{"morphology", "ground", "gait", "controller", "scenarios"};
    for (const auto& kv : root) {
        const std::string key = kv.first.Scalar();
        if (std::find(top.begin(), top.end(), key) == top.end()) {
            out.issues.push_back({key, line_of(kv.first),
                                  "unknown key (expected one of: morphology, ground, gait, "
                                  "controller, scenarios)"});
        }
    }

    Sections base;
    apply_sections(root, "", base, out.issues);

    const YAML::Node list = root["scenarios"];
    if (!list || !list.IsSequence() || list.size() == 0) {
        out.issues.push_back({"scenarios", list ? line_of(list) : 0, "at least one scenario is required"});
        return out;
    }

    std::map<std::string, int> seen;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const YAML::Node node = list[i];
        const std::string path = "scenarios." + std::to_string(i);
        if (!node.IsMap()) {
            out.issues.push_back({path, line_of(node), "expected a mapping"});
            continue;
        }
        for (const auto& kv : node) {
            const std::string key = kv.first.Scalar();
            if (std::find(scenario_keys().begin(), scenario_keys().end(), key) == scenario_keys().end()) {
                out.issues.push_back({path + "." + key, line_of(kv.first), "unknown scenario key"});
            }
        }
        Sections s = base;
        apply_sections(node, path, s, out.issues);

        Scenario sc;
        sc.morphology = s.morphology;
        sc.ground = s.ground;
        sc.gait = s.gait;
        sc.gains = s.gains;
        YAML::Node own(YAML::NodeType::Map);
        for (const auto& kv : node) {
            const std::string key = kv.first.Scalar();
            if (key != "morphology" && key != "ground" && key != "gait" && key != "controller" &&
                std::find(scenario_keys().begin(), scenario_keys().end(), key) != scenario_keys().end()) {
                own[kv.first] = kv.second;
            }
        }
        sc.name = "scenario_" + std::to_string(i);
        apply_map(own, scenario_own_fields(), path, sc, out.issues, &s.origins, "scenario.");
        if (!node["name"]) {
            out.issues.push_back({path + ".name", line_of(node), "scenario name is required"});
        } else if (auto [it, fresh] = seen.emplace(sc.name, line_of(node)); !fresh) {
            out.issues.push_back({path + ".name", line_of(node["name"]),
                                  "duplicate scenario name '" + sc.name + "' (first at line " +
                                      std::to_string(it->second) + ")"});
        }
        check_scenario(sc, s, path, out.issues);
        out.scenarios.push_back(std::move(sc));
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError({{path.string(), 0, "cannot read file"}});
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string join_issues(const std::vector<ConfigIssue>& issues)
{
    std::string s;
    for (const ConfigIssue& i : issues) {
        s += (s.empty() ? "" : "\n") + i.to_string();
    }
    return s;
}

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
        if (c == '.') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace

std::string ConfigIssue::to_string() const
{
    std::string s = key.empty() ? "<document>" : key;
    if (line > 0) {
        s += " (line " + std::to_string(line) + ")";
    }
    return s + ": " + message;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues))
{
}

std::vector<std::string> ConfigFile::scenario_names() const
{
    std::vector<std::string> names;
    for (const Scenario& s : scenarios) {
        names.push_back(s.name);
    }
    return names;
}

const Scenario& ConfigFile::scenario(const std::string& name) const
{
    for (const Scenario& s : scenarios) {
        if (s.name == name) {
            return s;
        }
    }
    std::string available;
    for (const std::string& n : scenario_names()) {
        available += (available.empty() ? "" : ", ") + n;
    }
    throw ConfigError({{"scenario", 0, "no scenario named '" + name + "'; available: " + available}});
}

std::vector<ConfigIssue> check_config(const std::string& text)
{
    return parse_document(text).issues;
}

std::vector<ConfigIssue> check_config_file(const std::filesystem::path& path)
{
    try {
        return check_config(read_file(path));
    } catch (const ConfigError& e) {
        return e.issues();
    }
}

ConfigFile parse_config(const std::string& text, const std::string& source)
{
    Parsed p = parse_document(text);
    if (!p.issues.empty()) {
        throw ConfigError(std::move(p.issues));
    }
    return {source, std::move(p.scenarios)};
}

ConfigFile load_config(const std::filesystem::path& path)
{
    return parse_config(read_file(path), path.string());
}

YAML::Node resolved_node(const Scenario& sc)
{
    YAML::Node root(YAML::NodeType::Map);
    root["morphology"] = write_map(sc.morphology, morphology_fields());
    root["ground"] = write_map(sc.ground, ground_fields());
    root["gait"] = write_map(sc.gait, gait_fields());
    root["controller"] = write_map(sc.gains, controller_fields());
    YAML::Node list(YAML::NodeType::Sequence);
    list.push_back(write_map(sc, scenario_own_fields()));
    root["scenarios"] = list;
    return root;
}

std::string emit_resolved(const Scenario& sc)
{
    YAML::Emitter out;
    out << resolved_node(sc);
    return std::string(out.c_str()) + "\n";
}

void set_path(YAML::Node& root, const std::string& path, const std::string& value_text)
{
    const std::vector<std::string> parts = split_path(path);
    YAML::Node value;
    try {
        value = YAML::Load(value_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError({{path, 0, "cannot parse value '" + value_text + "': " + e.msg}});
    }
    YAML::Node cur = root;
    std::string walked;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string& part = parts[i];
        walked += (walked.empty() ? "" : ".") + part;
        YAML::Node next;
        if (cur.IsSequence()) {
            std::size_t idx = 0;
            const auto res = std::from_chars(part.data(), part.data() + part.size(), idx);
            if (res.ec != std::errc() || res.ptr != part.data() + part.size() || idx >= cur.size()) {
                throw ConfigError({{walked, 0, "no such list index"}});
            }
            if (i + 1 == parts.size()) {
                cur[idx] = value;
                return;
            }
            next = cur[idx];
        } else if (cur.IsMap() && cur[part]) {
            if (i + 1 == parts.size()) {
                cur[part] = value;
                return;
            }
            next = cur[part];
        } else {
            throw ConfigError({{walked, 0, "parameter path does not exist in the schema"}});
        }
        cur.reset(next);
    }
}

}  // namespace harpy::io
