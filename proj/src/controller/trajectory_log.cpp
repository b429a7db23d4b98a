#include <qtmpc/controller/trajectory_log.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qtmpc {

std::string_view to_string(StopReason reason)
{
    switch (reason)
    {
        case StopReason::none: return "none";
        case StopReason::target_reached: return "target_reached";
        case StopReason::max_time: return "max_time";
        case StopReason::max_steps: return "max_steps";
        case StopReason::controller_error: return "controller_error";
    }
    return "unknown";
}

void TrajectoryLog::add(LogEntry entry)
{
    if (entries.empty() && state_dim == 0)
    {
        state_dim   = static_cast<int>(entry.x.size());
        control_dim = static_cast<int>(entry.u.size());
    }
    if (entry.x.size() != state_dim || entry.u.size() != control_dim)
        throw std::invalid_argument("TrajectoryLog::add: dimension mismatch");
    entries.push_back(std::move(entry));
}

std::string TrajectoryLog::csv_header() const
{
    std::ostringstream os;
    os << 't';
    for (int i = 1; i <= state_dim; ++i) os << ",x" << i;
    for (int i = 1; i <= control_dim; ++i) os << ",u" << i;
    os << ",dt_applied,N,cpu_ms,mode";
    return os.str();
}

void TrajectoryLog::write_csv(std::ostream& os) const
{
    os << csv_header() << '\n';
    os << std::setprecision(17);
    auto row = [&](double t, const VectorXd& x, const VectorXd* u, double dt, int N, double cpu, const std::string& mode) {
        os << t;
        for (int i = 0; i < state_dim; ++i) os << ',' << x[i];
        for (int i = 0; i < control_dim; ++i)
        {
            os << ',';
            if (u) os << (*u)[i];
            else os << "nan";
        }
        os << ',' << dt << ',' << N << ',' << cpu << ',' << mode << '\n';
    };
    for (const LogEntry& e : entries) row(e.t, e.x, &e.u, e.dt_applied, e.N, e.cpu_ms, e.mode);
    if (final_state.size() == state_dim && state_dim > 0)
    {
        const LogEntry* last = entries.empty() ? nullptr : &entries.back();
        row(final_time, final_state, nullptr, 0.0, last ? last->N : 0, 0.0, last ? last->mode : std::string("mpc"));
    }
}

void TrajectoryLog::save_csv(const std::string& path) const
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(f);
}

TrajectoryLog TrajectoryLog::read_csv(std::istream& is)
{
    TrajectoryLog log;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("TrajectoryLog::read_csv: empty input");
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ','))
        {
            if (col.size() > 1 && col[0] == 'x' && std::isdigit(static_cast<unsigned char>(col[1]))) ++log.state_dim;
            if (col.size() > 1 && col[0] == 'u' && std::isdigit(static_cast<unsigned char>(col[1]))) ++log.control_dim;
        }
    }
    std::vector<LogEntry> rows;
    while (std::getline(is, line))
    {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        auto next = [&]() {
            if (!std::getline(ls, cell, ',')) throw std::invalid_argument("TrajectoryLog::read_csv: short row");
            return cell;
        };
        LogEntry e;
        e.t = std::stod(next());
        e.x.resize(log.state_dim);
        e.u.resize(log.control_dim);
        for (int i = 0; i < log.state_dim; ++i) e.x[i] = std::stod(next());
        for (int i = 0; i < log.control_dim; ++i)
        {
            const std::string c = next();
            e.u[i] = c == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(c);
        }
        e.dt_applied = std::stod(next());
        e.N          = std::stoi(next());
        e.cpu_ms     = std::stod(next());
        e.mode       = next();
        rows.push_back(std::move(e));
    }
    // A trailing row without control is the final state.
    if (!rows.empty() && log.control_dim > 0 && std::isnan(rows.back().u[0]))
    {
        log.final_time  = rows.back().t;
        log.final_state = rows.back().x;
        rows.pop_back();
    }
    log.entries = std::move(rows);
    return log;
}

int TrajectoryLog::mode_switches() const
{
    int n = 0;
    for (std::size_t k = 1; k < entries.size(); ++k) n += entries[k].mode != entries[k - 1].mode;
    return n;
}

}  // namespace qtmpc
