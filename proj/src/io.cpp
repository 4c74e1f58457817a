#include "satsw/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "satsw/errors.hpp"

namespace satsw::io {

using nlohmann::json;

namespace {

json parseJson(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    return j;
}

/// Map nlohmann access/type errors onto ParseError so callers see one type.
template <typename Fn>
auto guardJson(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

Matrix jsonToMatrix(const json& j, const std::string& name) {
    if (!j.is_array() || j.empty()) throw ParseError(name + ": expected nested array");
    const auto rows = j.size();
    if (!j[0].is_array()) {
        // flat array -> row vector is ambiguous; require nested form
        throw ParseError(name + ": expected row-major nested arrays");
    }
    const auto cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ParseError(name + ": ragged rows");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw ParseError(name + ": non-numeric entry");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

json matrixToJson(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector jsonToVector(const json& j, const std::string& name) {
    if (!j.is_array()) throw ParseError(name + ": expected array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(name + ": non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

json vectorToJson(const Vector& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

double requireNumber(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError("missing or non-numeric field: " + key);
    return j[key].get<double>();
}

void appendVector(std::ostringstream& os, const Vector& v) {
    for (int i = 0; i < v.size(); ++i) os << "," << v(i);
}

}  // namespace

SwitchedPlant parsePlant(const std::string& text) {
    return guardJson([&] {
    json j = parseJson(text);
    if (!j.contains("modes") || !j["modes"].is_array() || j["modes"].empty())
        throw ParseError("plant: missing modes array");
    SwitchedPlant p;
    for (const auto& jm : j["modes"]) {
        PlantMode m;
        m.A_p = jsonToMatrix(jm.at("A_p"), "A_p");
        m.B_p1 = jsonToMatrix(jm.at("B_p1"), "B_p1");
        m.B_p2 = jsonToMatrix(jm.at("B_p2"), "B_p2");
        m.C_p1 = jsonToMatrix(jm.at("C_p1"), "C_p1");
        m.D_p11 = jsonToMatrix(jm.at("D_p11"), "D_p11");
        m.D_p12 = jsonToMatrix(jm.at("D_p12"), "D_p12");
        m.C_p2 = jsonToMatrix(jm.at("C_p2"), "C_p2");
        m.D_p21 = jsonToMatrix(jm.at("D_p21"), "D_p21");
        m.D_p22 = jm.contains("D_p22")
                      ? jsonToMatrix(jm["D_p22"], "D_p22")
                      : Matrix::Zero(m.C_p2.rows(), m.B_p2.cols()).eval();
        p.modes.push_back(std::move(m));
    }
    if (!j.contains("u_bar")) throw ParseError("plant: missing u_bar");
    p.u_bar = jsonToVector(j["u_bar"], "u_bar");
    p.checkDimensions();
    return p;
    });
}

SwitchedPlant loadPlant(const std::string& path) { return parsePlant(readFile(path)); }

void savePlant(const SwitchedPlant& plant, const std::string& path) {
    json j;
    j["modes"] = json::array();
    for (const auto& m : plant.modes) {
        json jm;
        jm["A_p"] = matrixToJson(m.A_p);
        jm["B_p1"] = matrixToJson(m.B_p1);
        jm["B_p2"] = matrixToJson(m.B_p2);
        jm["C_p1"] = matrixToJson(m.C_p1);
        jm["D_p11"] = matrixToJson(m.D_p11);
        jm["D_p12"] = matrixToJson(m.D_p12);
        jm["C_p2"] = matrixToJson(m.C_p2);
        jm["D_p21"] = matrixToJson(m.D_p21);
        jm["D_p22"] = matrixToJson(m.D_p22);
        j["modes"].push_back(std::move(jm));
    }
    j["u_bar"] = vectorToJson(plant.u_bar);
    writeFile(path, j.dump(2) + "\n");
}

SynthesisSpec parseSpec(const std::string& text) {
    return guardJson([&] {
    json j = parseJson(text);
    SynthesisSpec s;
    s.lambda0 = requireNumber(j, "lambda0");
    s.mu = requireNumber(j, "mu");
    s.s = requireNumber(j, "s");
    if (j.contains("gamma") && !j["gamma"].is_null()) {
        s.gamma_mode = GammaMode::Fixed;
        s.gamma_fixed = j["gamma"].get<double>();
    }
    if (j.contains("epsilon") && !j["epsilon"].is_null())
        s.epsilon = j["epsilon"].get<double>();
    if (j.contains("delta") && !j["delta"].is_null()) s.delta = j["delta"].get<double>();
    if (j.contains("kappa") && !j["kappa"].is_null()) s.kappa = j["kappa"].get<double>();
    s.check();
    return s;
    });
}

SynthesisSpec loadSpec(const std::string& path) { return parseSpec(readFile(path)); }

void saveSpec(const SynthesisSpec& spec, const std::string& path) {
    json j;
    j["lambda0"] = spec.lambda0;
    j["mu"] = spec.mu;
    j["s"] = spec.s;
    j["gamma"] = spec.gamma_mode == GammaMode::Fixed ? json(spec.gamma_fixed) : json(nullptr);
    j["epsilon"] = spec.epsilon > 0.0 ? json(spec.epsilon) : json(nullptr);
    j["delta"] = spec.delta;
    j["kappa"] = spec.kappa ? json(*spec.kappa) : json(nullptr);
    writeFile(path, j.dump(2) + "\n");
}

SwitchingSignal parseSignal(const std::string& text) {
    return guardJson([&] {
    json j = parseJson(text);
    if (!j.contains("segments") || !j["segments"].is_array())
        throw ParseError("signal: missing segments");
    SwitchingSignal s;
    for (const auto& seg : j["segments"]) {
        if (!seg.is_array() || seg.size() != 2) throw ParseError("signal: bad segment");
        s.segments.emplace_back(seg[0].get<double>(), seg[1].get<int>());
    }
    s.horizon = requireNumber(j, "horizon");
    return s;
    });
}

SwitchingSignal loadSignal(const std::string& path) { return parseSignal(readFile(path)); }

void saveSignal(const SwitchingSignal& signal, const std::string& path) {
    json j;
    j["segments"] = json::array();
    for (const auto& [t, m] : signal.segments) j["segments"].push_back(json::array({t, m}));
    j["horizon"] = signal.horizon;
    writeFile(path, j.dump(2) + "\n");
}

std::string controllerToJson(const synth::HybridController& ctrl) {
    json j;
    j["gamma"] = ctrl.gamma;
    j["lambda0"] = ctrl.lambda0;
    j["mu"] = ctrl.mu;
    j["s"] = ctrl.s;
    j["tau_a_star"] = ctrl.tau_a_star;
    j["modes"] = json::array();
    for (const auto& m : ctrl.modes) {
        json jm;
        jm["A_k"] = matrixToJson(m.A_k);
        jm["B_k1"] = matrixToJson(m.B_k1);
        jm["B_k2"] = matrixToJson(m.B_k2);
        jm["C_k1"] = matrixToJson(m.C_k1);
        jm["D_k11"] = matrixToJson(m.D_k11);
        jm["D_k12"] = matrixToJson(m.D_k12);
        if (m.H1.size() > 0) jm["H1"] = matrixToJson(m.H1);
        if (m.H2.size() > 0) jm["H2"] = matrixToJson(m.H2);
        if (m.P.size() > 0) jm["P"] = matrixToJson(m.P);
        if (m.U.size() > 0) jm["U"] = matrixToJson(m.U);
        j["modes"].push_back(std::move(jm));
    }
    json resets = json::object();
    for (const auto& [ij, d] : ctrl.resets)
        resets[std::to_string(ij.first) + "->" + std::to_string(ij.second)] = matrixToJson(d);
    j["resets"] = std::move(resets);
    return j.dump(2) + "\n";
}

synth::HybridController parseController(const std::string& text) {
    return guardJson([&] {
    json j = parseJson(text);
    synth::HybridController c;
    c.gamma = requireNumber(j, "gamma");
    c.lambda0 = requireNumber(j, "lambda0");
    c.mu = requireNumber(j, "mu");
    c.s = requireNumber(j, "s");
    c.tau_a_star = j.contains("tau_a_star") ? j["tau_a_star"].get<double>()
                                            : std::log(c.mu) / c.lambda0;
    if (!j.contains("modes") || !j["modes"].is_array())
        throw ParseError("controller: missing modes");
    for (const auto& jm : j["modes"]) {
        synth::ControllerMode m;
        m.A_k = jsonToMatrix(jm.at("A_k"), "A_k");
        m.B_k1 = jsonToMatrix(jm.at("B_k1"), "B_k1");
        m.B_k2 = jsonToMatrix(jm.at("B_k2"), "B_k2");
        m.C_k1 = jsonToMatrix(jm.at("C_k1"), "C_k1");
        m.D_k11 = jsonToMatrix(jm.at("D_k11"), "D_k11");
        m.D_k12 = jsonToMatrix(jm.at("D_k12"), "D_k12");
        if (jm.contains("H1")) m.H1 = jsonToMatrix(jm["H1"], "H1");
        if (jm.contains("H2")) m.H2 = jsonToMatrix(jm["H2"], "H2");
        if (jm.contains("P")) m.P = jsonToMatrix(jm["P"], "P");
        if (jm.contains("U")) m.U = jsonToMatrix(jm["U"], "U");
        c.modes.push_back(std::move(m));
    }
    if (j.contains("resets")) {
        for (const auto& [key, val] : j["resets"].items()) {
            int i = 0, jj = 0;
            if (std::sscanf(key.c_str(), "%d->%d", &i, &jj) != 2)
                throw ParseError("controller: bad reset key " + key);
            c.resets.emplace(std::make_pair(i, jj), jsonToMatrix(val, key));
        }
    }
    return c;
    });
}

synth::HybridController loadController(const std::string& path) {
    return parseController(readFile(path));
}

void saveController(const synth::HybridController& ctrl, const std::string& path) {
    writeFile(path, controllerToJson(ctrl));
}

Disturbance loadDisturbanceSamples(const std::string& path) {
    return guardJson([&] {
    json j = parseJson(readFile(path));
    if (!j.contains("times") || !j.contains("values"))
        throw ParseError("disturbance: need times and values");
    std::vector<double> times;
    for (const auto& t : j["times"]) times.push_back(t.get<double>());
    std::vector<Vector> values;
    for (const auto& v : j["values"]) values.push_back(jsonToVector(v, "values"));
    return Disturbance::samples(std::move(times), std::move(values));
    });
}

Disturbance parseDisturbanceSpec(const std::string& spec) {
    if (spec == "zero") return Disturbance::zero();
    if (spec.rfind("pulse:", 0) == 0) {
        double mag = 0.0, on = 0.0, off = 0.0;
        if (std::sscanf(spec.c_str(), "pulse:%lf,%lf,%lf", &mag, &on, &off) != 3)
            throw ParseError("disturbance spec: expected pulse:<mag>,<t_on>,<t_off>");
        return Disturbance::pulse(mag, on, off);
    }
    if (spec.rfind("file:", 0) == 0) return loadDisturbanceSamples(spec.substr(5));
    throw ParseError("disturbance spec: unknown form '" + spec + "'");
}

std::string traceCsv(const hybridsim::SimulationTrace& trace) {
    std::ostringstream os;
    os << std::setprecision(12);
    if (trace.steps.empty()) return "t,mode\n";
    const auto& s0 = trace.steps.front();
    os << "t,mode";
    for (int i = 0; i < s0.x_p.size(); ++i) os << ",xp" << i + 1;
    for (int i = 0; i < s0.x_k.size(); ++i) os << ",xk" << i + 1;
    for (int i = 0; i < s0.u.size(); ++i) os << ",u" << i + 1;
    for (int i = 0; i < s0.sat_u.size(); ++i) os << ",satu" << i + 1;
    for (int i = 0; i < s0.w.size(); ++i) os << ",w" << i + 1;
    for (int i = 0; i < s0.z.size(); ++i) os << ",z" << i + 1;
    os << "\n";
    for (const auto& st : trace.steps) {
        os << st.t << "," << st.mode;
        appendVector(os, st.x_p);
        appendVector(os, st.x_k);
        appendVector(os, st.u);
        appendVector(os, st.sat_u);
        appendVector(os, st.w);
        appendVector(os, st.z);
        os << "\n";
    }
    return os.str();
}

std::string eventCsv(const hybridsim::SimulationTrace& trace) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "t,from,to";
    int n = trace.events.empty() ? 0 : static_cast<int>(trace.events.front().xk_before.size());
    for (int i = 0; i < n; ++i) os << ",xk_before" << i + 1;
    for (int i = 0; i < n; ++i) os << ",xk_after" << i + 1;
    os << "\n";
    for (const auto& ev : trace.events) {
        os << ev.t << "," << ev.from << "," << ev.to;
        appendVector(os, ev.xk_before);
        appendVector(os, ev.xk_after);
        os << "\n";
    }
    return os.str();
}

void writeFile(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open for writing: " + path);
    f << content;
}

std::string readFile(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

std::string svgLineChart(const std::string& title, const std::vector<Series>& series,
                         int width, int height) {
    const int ml = 50, mr = 10, mt = 22, mb = 24;
    double tmin = 0, tmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            if (!any) {
                tmin = tmax = s.t[i];
                ymin = ymax = s.y[i];
                any = true;
            }
            tmin = std::min(tmin, s.t[i]);
            tmax = std::max(tmax, s.t[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (tmax <= tmin) tmax = tmin + 1.0;
    if (ymax <= ymin) {
        ymax = ymin + 1.0;
        ymin -= 1.0;
    }
    double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double t) { return ml + (t - tmin) / (tmax - tmin) * (width - ml - mr); };
    auto py = [&](double y) {
        return mt + (ymax - y) / (ymax - ymin) * (height - mt - mb);
    };
    const char* colors[] = {"#1f6fb4", "#d1462f", "#2f9e44", "#9046cf", "#c7841a"};

    std::ostringstream os;
    os << std::setprecision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<text x=\"" << ml << "\" y=\"14\" font-size=\"12\" font-family=\"sans-serif\">"
       << title << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
       << "\" height=\"" << height - mt - mb
       << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    os << "<text x=\"4\" y=\"" << py(ymax) + 4 << "\" font-size=\"10\" font-family=\"sans-serif\">"
       << ymax << "</text>\n";
    os << "<text x=\"4\" y=\"" << py(ymin) << "\" font-size=\"10\" font-family=\"sans-serif\">"
       << ymin << "</text>\n";
    os << "<text x=\"" << px(tmin) << "\" y=\"" << height - 6
       << "\" font-size=\"10\" font-family=\"sans-serif\">" << tmin << "</text>\n";
    os << "<text x=\"" << px(tmax) - 20 << "\" y=\"" << height - 6
       << "\" font-size=\"10\" font-family=\"sans-serif\">" << tmax << "</text>\n";
    if (ymin < 0.0 && ymax > 0.0)
        os << "<line x1=\"" << ml << "\" y1=\"" << py(0.0) << "\" x2=\"" << width - mr
           << "\" y2=\"" << py(0.0) << "\" stroke=\"#bbb\" stroke-width=\"0.5\"/>\n";
    int ci = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 5]
           << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.t.size(); ++i)
            os << px(s.t[i]) << "," << py(s.y[i]) << " ";
        os << "\"/>\n";
        os << "<text x=\"" << width - mr - 60 << "\" y=\"" << mt + 14 + 12 * ci
           << "\" font-size=\"10\" font-family=\"sans-serif\" fill=\"" << colors[ci % 5]
           << "\">" << s.label << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

std::string traceSvg(const hybridsim::SimulationTrace& trace) {
    auto collect = [&](auto getter) {
        Series s;
        for (const auto& st : trace.steps) {
            s.t.push_back(st.t);
            s.y.push_back(getter(st));
        }
        return s;
    };
    std::vector<std::string> charts;
    {
        std::vector<Series> zs;
        int nz = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().z.size());
        for (int i = 0; i < nz; ++i) {
            auto s = collect([i](const hybridsim::TraceStep& st) { return st.z(i); });
            s.label = "z" + std::to_string(i + 1);
            zs.push_back(std::move(s));
        }
        charts.push_back(svgLineChart("controlled output z(t)", zs));
    }
    {
        std::vector<Series> us;
        int nu = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().u.size());
        for (int i = 0; i < nu; ++i) {
            auto s = collect([i](const hybridsim::TraceStep& st) { return st.sat_u(i); });
            s.label = "sat(u)" + std::to_string(i + 1);
            us.push_back(std::move(s));
        }
        charts.push_back(svgLineChart("saturated input sat(u)(t)", us));
    }
    {
        std::vector<Series> xs;
        int n = trace.steps.empty() ? 0 : static_cast<int>(trace.steps.front().x_p.size());
        for (int i = 0; i < n; ++i) {
            auto s = collect([i](const hybridsim::TraceStep& st) { return st.x_p(i); });
            s.label = "xp" + std::to_string(i + 1);
            xs.push_back(std::move(s));
        }
        charts.push_back(svgLineChart("plant states x_p(t)", xs));
    }
    {
        auto s = collect([](const hybridsim::TraceStep& st) { return double(st.mode); });
        s.label = "mode";
        charts.push_back(svgLineChart("switching signal", {s}, 720, 120));
    }

    // stack the charts vertically in one document
    std::ostringstream os;
    int total = 3 * 240 + 120;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"" << total
       << "\" viewBox=\"0 0 720 " << total << "\">\n";
    int y = 0;
    for (const auto& c : charts) {
        os << "<g transform=\"translate(0," << y << ")\">\n";
        // strip the outer <svg ...> and </svg> wrapper
        auto start = c.find('>') + 1;
        auto end = c.rfind("</svg>");
        os << c.substr(start, end - start);
        os << "</g>\n";
        y += (c.find("height=\"120\"") != std::string::npos) ? 120 : 240;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace satsw::io
