#include "fpq/io.hpp"

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fpq/error.hpp"
#include "fpq/version.hpp"

namespace fpq::io {
namespace {

std::string format_int(std::int64_t v) { return std::to_string(v); }

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw DataError(path + ":" + std::to_string(line) + ": " + what);
}

double parse_double_field(const std::string& path, std::size_t line,
                          std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    if (field == "inf") return std::numeric_limits<double>::infinity();
    if (field == "-inf") return -std::numeric_limits<double>::infinity();
    fail(path, line, "bad number '" + std::string(field) + "'");
  }
  return v;
}

int parse_int_field(const std::string& path, std::size_t line, std::string_view field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail(path, line, "bad integer '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

void write_header(std::ofstream& out, const FileHeader& header) {
  out << "# fpq " << kVersion << "\n";
  out << "# seed=" << header.seed << "\n";
  out << "# config_hash=" << header.config_hash << "\n";
}

// Reads one logical CSV line, skipping comments and blank lines; keeps the
// 1-based physical line number for error messages.
class CsvReader {
 public:
  explicit CsvReader(const std::string& path) : path_(path), in_(open_in(path)) {}

  bool next(std::vector<std::string_view>* fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.empty() || line_[0] == '#') continue;
      *fields = split_fields(line_);
      return true;
    }
    return false;
  }

  std::size_t line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void error(const std::string& what) const { fail(path_, line_no_, what); }

  void expect_columns(const std::vector<std::string_view>& fields, std::size_t n) const {
    if (fields.size() != n)
      fail(path_, line_no_, "expected " + std::to_string(n) + " columns, got " +
                                std::to_string(fields.size()));
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

SampleId sample_from(const std::vector<std::string_view>& fields, std::size_t at,
                     const CsvReader& reader) {
  SampleId id;
  id.subject = std::string(fields[at]);
  id.finger = std::string(fields[at + 1]);
  id.imprint = parse_int_field(reader.path(), reader.line_no(), fields[at + 2]);
  return id;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string config_hash(const std::map<std::string, std::string>& effective) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  const auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [k, v] : effective) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    const auto is_space = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && is_space(s.front())) s.erase(s.begin());
    while (!s.empty() && is_space(s.back())) s.pop_back();
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value");
    out[trim(stripped.substr(0, eq))] = trim(stripped.substr(eq + 1));
  }
  return out;
}

// --- scores --------------------------------------------------------------

void write_scores_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster,
                      const std::vector<MatcherData>& matchers,
                      const std::vector<std::vector<std::int32_t>>& partners) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "matcher,probe_subject,probe_finger,probe_imprint,"
         "gallery_subject,gallery_finger,gallery_imprint,score,kind\n";
  std::string buf;
  for (const MatcherData& md : matchers) {
    // genuine pairs once, probe = lower imprint
    for (int f = 0; f < roster.finger_count(); ++f) {
      for (int i : roster.finger(f)) {
        const SampleId& probe = roster.sample(i);
        for (const GenuineScore& g : md.sets[i].genuine) {
          if (g.peer_imprint < probe.imprint) continue;
          buf.clear();
          buf += md.matcher;
          buf += ',';
          buf += probe.subject;
          buf += ',';
          buf += probe.finger;
          buf += ',';
          buf += format_int(probe.imprint);
          buf += ',';
          buf += probe.subject;
          buf += ',';
          buf += probe.finger;
          buf += ',';
          buf += format_int(g.peer_imprint);
          buf += ',';
          buf += format_double(g.score);
          buf += ",genuine\n";
          out << buf;
        }
      }
    }
    for (int i = 0; i < roster.size(); ++i) {
      const SampleId& probe = roster.sample(i);
      const auto& imp = md.sets[i].impostor;
      for (std::size_t k = 0; k < imp.size(); ++k) {
        const SampleId& gallery = roster.sample(partners[i][k]);
        buf.clear();
        buf += md.matcher;
        buf += ',';
        buf += probe.subject;
        buf += ',';
        buf += probe.finger;
        buf += ',';
        buf += format_int(probe.imprint);
        buf += ',';
        buf += gallery.subject;
        buf += ',';
        buf += gallery.finger;
        buf += ',';
        buf += format_int(gallery.imprint);
        buf += ',';
        buf += format_double(imp[k]);
        buf += ",impostor\n";
        out << buf;
      }
    }
  }
}

ScoresFile read_scores_csv(const std::string& path) {
  struct Row {
    int matcher;
    SampleId probe, gallery;
    double score;
    bool genuine;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::vector<std::string> matcher_names;

  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.empty() || fields[0] != "matcher")
        reader.error("missing scores header row");
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 9);
    Row row;
    const std::string matcher(fields[0]);
    const auto it = std::find(matcher_names.begin(), matcher_names.end(), matcher);
    if (it == matcher_names.end()) {
      row.matcher = static_cast<int>(matcher_names.size());
      matcher_names.push_back(matcher);
    } else {
      row.matcher = static_cast<int>(it - matcher_names.begin());
    }
    row.probe = sample_from(fields, 1, reader);
    row.gallery = sample_from(fields, 4, reader);
    row.score = parse_double_field(path, reader.line_no(), fields[7]);
    if (fields[8] == "genuine") row.genuine = true;
    else if (fields[8] == "impostor") row.genuine = false;
    else reader.error("kind must be genuine or impostor");
    row.line = reader.line_no();
    rows.push_back(std::move(row));
  }
  if (!saw_header_row) throw DataError(path + ": empty scores file");
  if (rows.empty()) throw DataError(path + ": no score rows");

  // roster from probe ids plus genuine gallery ids
  std::vector<SampleId> ids;
  ids.reserve(rows.size() / 4);
  for (const Row& r : rows) {
    ids.push_back(r.probe);
    if (r.genuine) ids.push_back(r.gallery);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  ScoresFile out;
  out.roster = Roster::build(std::move(ids));
  out.matchers.resize(matcher_names.size());
  for (std::size_t m = 0; m < matcher_names.size(); ++m) {
    out.matchers[m].matcher = matcher_names[m];
    out.matchers[m].sets.resize(out.roster.size());
    for (int i = 0; i < out.roster.size(); ++i) out.matchers[m].sets[i].sample = i;
  }

  for (const Row& r : rows) {
    MatcherData& md = out.matchers[r.matcher];
    const int probe = out.roster.index_of(r.probe);
    if (probe < 0) fail(path, r.line, "unknown probe sample");
    if (r.genuine) {
      const int gallery = out.roster.index_of(r.gallery);
      if (gallery < 0) fail(path, r.line, "unknown gallery sample");
      if (r.probe.finger != r.gallery.finger || r.probe.subject != r.gallery.subject)
        fail(path, r.line, "genuine pair must compare imprints of one finger");
      if (r.probe.imprint == r.gallery.imprint)
        fail(path, r.line, "genuine pair must compare distinct imprints");
      md.sets[probe].genuine.push_back({r.gallery.imprint, r.score});
      md.sets[gallery].genuine.push_back({r.probe.imprint, r.score});
    } else {
      if (r.probe.subject == r.gallery.subject)
        fail(path, r.line, "impostor pair within one subject");
      md.sets[probe].impostor.push_back(r.score);
    }
  }

  // shape validation: full genuine sets, a uniform impostor count
  const int expected_genuine = out.roster.imprints_per_finger() - 1;
  std::size_t impostor_count = 0;
  for (const MatcherData& md : out.matchers) {
    for (int i = 0; i < out.roster.size(); ++i) {
      const ScoreSet& set = md.sets[i];
      if (static_cast<int>(set.genuine.size()) != expected_genuine)
        throw DataError(path + ": sample " + to_string(out.roster.sample(i)) +
                        " under " + md.matcher + " has " +
                        std::to_string(set.genuine.size()) + " genuine scores, expected " +
                        std::to_string(expected_genuine));
      if (impostor_count == 0) impostor_count = set.impostor.size();
      if (set.impostor.size() != impostor_count)
        throw DataError(path + ": sample " + to_string(out.roster.sample(i)) +
                        " under " + md.matcher + " has " +
                        std::to_string(set.impostor.size()) + " impostor scores, expected " +
                        std::to_string(impostor_count));
    }
  }
  return out;
}

// --- features / latent -----------------------------------------------------

void write_features_csv(const std::string& path, const FileHeader& header,
                        const Roster& roster, const Eigen::MatrixXd& features) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "subject,finger,imprint";
  for (int j = 0; j < features.rows(); ++j) out << ",f" << (j + 1);
  out << "\n";
  for (int i = 0; i < roster.size(); ++i) {
    const SampleId& id = roster.sample(i);
    out << id.subject << ',' << id.finger << ',' << id.imprint;
    for (int j = 0; j < features.rows(); ++j)
      out << ',' << format_double(features(j, i));
    out << "\n";
  }
}

FeaturesFile read_features_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  int n_features = 0;

  std::vector<SampleId> ids;
  std::vector<std::vector<double>> values;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.size() < 4 || fields[0] != "subject")
        reader.error("missing features header row");
      n_features = static_cast<int>(fields.size()) - 3;
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 3 + n_features);
    ids.push_back(sample_from(fields, 0, reader));
    std::vector<double> row(n_features);
    for (int j = 0; j < n_features; ++j)
      row[j] = parse_double_field(path, reader.line_no(), fields[3 + j]);
    values.push_back(std::move(row));
  }
  if (ids.empty()) throw DataError(path + ": no feature rows");

  FeaturesFile out;
  out.roster = Roster::build(ids);
  out.features.resize(n_features, out.roster.size());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const int i = out.roster.index_of(ids[r]);
    for (int j = 0; j < n_features; ++j) out.features(j, i) = values[r][j];
  }
  return out;
}

void write_latent_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster, const Eigen::VectorXd& quality) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "subject,finger,imprint,q\n";
  for (int i = 0; i < roster.size(); ++i) {
    const SampleId& id = roster.sample(i);
    out << id.subject << ',' << id.finger << ',' << id.imprint << ','
        << format_double(quality[i]) << "\n";
  }
}

// --- ranks -------------------------------------------------------------------

void write_ranks_csv(const std::string& path, const FileHeader& header,
                     const Roster& roster,
                     const std::vector<pipeline::MatcherRanking>& rankings) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "matcher,subject,finger,imprint,nms,variant,rank\n";
  for (const auto& ranking : rankings) {
    for (int i = 0; i < roster.size(); ++i) {
      if (std::isnan(ranking.final_rank[i])) continue;  // degenerate: no rank
      const SampleId& id = roster.sample(i);
      out << ranking.matcher << ',' << id.subject << ',' << id.finger << ','
          << id.imprint << ',' << format_double(ranking.nms[i]) << ','
          << pipeline::to_string(ranking.variant[i]) << ','
          << format_double(ranking.final_rank[i]) << "\n";
    }
  }
}

std::vector<RankRow> read_ranks_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  std::vector<RankRow> rows;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.empty() || fields[0] != "matcher")
        reader.error("missing ranks header row");
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 7);
    RankRow row;
    row.matcher = std::string(fields[0]);
    row.sample = sample_from(fields, 1, reader);
    row.nms = parse_double_field(path, reader.line_no(), fields[4]);
    row.variant = std::string(fields[5]);
    row.rank = parse_double_field(path, reader.line_no(), fields[6]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no rank rows");
  return rows;
}

// --- labels / predictions ------------------------------------------------------

void write_labels_csv(const std::string& path, const FileHeader& header,
                      const Roster& roster,
                      const std::vector<classify::QualityLabel>& labels) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "subject,finger,imprint,fused_rank,class\n";
  for (const auto& label : labels) {
    const SampleId& id = roster.sample(label.sample);
    out << id.subject << ',' << id.finger << ',' << id.imprint << ','
        << format_double(label.fused_rank) << ',' << label.class_label << "\n";
  }
}

std::vector<LabelRow> read_labels_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  std::vector<LabelRow> rows;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.empty() || fields[0] != "subject")
        reader.error("missing labels header row");
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 5);
    LabelRow row;
    row.sample = sample_from(fields, 0, reader);
    row.fused_rank = parse_double_field(path, reader.line_no(), fields[3]);
    row.class_label = parse_int_field(path, reader.line_no(), fields[4]);
    if (row.class_label < 1) reader.error("class must be >= 1");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no label rows");
  return rows;
}

void write_predictions_csv(const std::string& path, const FileHeader& header,
                           const std::vector<SampleId>& samples,
                           const std::vector<int>& classes) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "subject,finger,imprint,class\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << samples[i].subject << ',' << samples[i].finger << ','
        << samples[i].imprint << ',' << classes[i] << "\n";
  }
}

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  std::vector<PredictionRow> rows;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.empty() || fields[0] != "subject")
        reader.error("missing predictions header row");
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 4);
    PredictionRow row;
    row.sample = sample_from(fields, 0, reader);
    row.class_label = parse_int_field(path, reader.line_no(), fields[3]);
    if (row.class_label < 1) reader.error("class must be >= 1");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no prediction rows");
  return rows;
}

std::vector<std::pair<SampleId, double>> read_pattern_weights_csv(
    const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  bool saw_header_row = false;
  std::vector<std::pair<SampleId, double>> rows;
  while (reader.next(&fields)) {
    if (!saw_header_row) {
      if (fields.empty() || fields[0] != "subject")
        reader.error("missing pattern-weights header row");
      saw_header_row = true;
      continue;
    }
    reader.expect_columns(fields, 4);
    rows.emplace_back(sample_from(fields, 0, reader),
                      parse_double_field(path, reader.line_no(), fields[3]));
  }
  return rows;
}

// --- evaluation outputs ----------------------------------------------------------

void write_det_csv(const std::string& path, const FileHeader& header,
                   const eval::DetCurve& curve) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "# decision rule: match iff score >= threshold\n";
  out << "threshold,fmr,fnmr\n";
  for (const auto& p : curve.points) {
    out << format_double(p.threshold) << ',' << format_double(p.fmr) << ','
        << format_double(p.fnmr) << "\n";
  }
  out << "# eer=" << format_double(curve.eer) << "\n";
}

void write_histogram_csv(const std::string& path, const FileHeader& header,
                         const eval::DeviationHistogram& histogram) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "deviation,count,fraction\n";
  const char* names[4] = {"0", "1", "2", "3+"};
  for (int b = 0; b < 4; ++b) {
    out << names[b] << ',' << histogram.counts[b] << ','
        << format_double(histogram.fractions[b]) << "\n";
  }
}

void write_correlation_csv(const std::string& path, const FileHeader& header,
                           const eval::CorrelationTable& table) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "matcher";
  for (const auto& name : table.matchers) out << ',' << name;
  out << "\n";
  for (std::size_t i = 0; i < table.matchers.size(); ++i) {
    out << table.matchers[i];
    for (std::size_t j = 0; j < table.matchers.size(); ++j)
      out << ',' << format_double(table.coefficients(i, j));
    out << "\n";
  }
}

// --- training outputs -----------------------------------------------------------

void write_history_csv(const std::string& path, const FileHeader& header,
                       const std::vector<nn::RunRecord>& history) {
  std::ofstream out = open_out(path);
  write_header(out, header);
  out << "run,objective,test_accuracy\n";
  for (const auto& r : history) {
    out << r.run << ',' << format_double(r.objective) << ','
        << format_double(r.test_accuracy) << "\n";
  }
}

// --- model file --------------------------------------------------------------------

namespace {

std::string hexfloat(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

void write_values(std::ofstream& out, const char* key, const double* data,
                  std::size_t n, bool hex) {
  out << key << " =";
  for (std::size_t i = 0; i < n; ++i)
    out << ' ' << (hex ? hexfloat(data[i]) : format_double(data[i]));
  out << "\n";
}

std::vector<double> parse_values(const std::string& path, const std::string& rest,
                                 std::size_t expected) {
  std::vector<double> out;
  std::istringstream in(rest);
  std::string token;
  while (in >> token) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
      throw DataError(path + ": bad model value '" + token + "'");
    out.push_back(v);
  }
  if (expected != 0 && out.size() != expected)
    throw DataError(path + ": expected " + std::to_string(expected) +
                    " values, got " + std::to_string(out.size()));
  return out;
}

void fill_row_major(Eigen::MatrixXd& m, const std::vector<double>& v) {
  int k = 0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) m(r, c) = v[k++];
}

}  // namespace

void save_model(const std::string& path, const nn::NetworkModel& model) {
  std::ofstream out = open_out(path);
  out << "# fpq model v1 (" << kVersion << ")\n";
  out << "layer_sizes = " << model.n_in() << ' ' << model.n_hidden() << ' '
      << model.n_out() << "\n";
  out << "activation = sigmoid\n";
  write_values(out, "feature_mean", model.transform.mean.data(),
               model.transform.mean.size(), true);
  write_values(out, "feature_scale", model.transform.scale.data(),
               model.transform.scale.size(), true);

  // row-major weight dumps in hex-float: loads reproduce predictions bitwise
  std::vector<double> tmp;
  const auto dump_matrix = [&](const char* key, const Eigen::MatrixXd& m) {
    tmp.clear();
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) tmp.push_back(m(r, c));
    write_values(out, key, tmp.data(), tmp.size(), true);
  };
  dump_matrix("weights_ih", model.w_ih);
  write_values(out, "bias_h", model.b_h.data(), model.b_h.size(), true);
  dump_matrix("weights_ho", model.w_ho);
  write_values(out, "bias_o", model.b_o.data(), model.b_o.size(), true);
  if (model.has_mask()) {
    dump_matrix("pruned_mask_ih", model.mask_ih);
    dump_matrix("pruned_mask_ho", model.mask_ho);
  }
  out << "train_config_echo = " << model.train_config_echo << "\n";
}

nn::NetworkModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path + ": expected 'key = values'");
    std::string key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    entries[key] = line.substr(eq + 1);
  }

  const auto need = [&](const std::string& key) -> const std::string& {
    const auto it = entries.find(key);
    if (it == entries.end()) throw DataError(path + ": missing field '" + key + "'");
    return it->second;
  };

  const auto sizes = parse_values(path, need("layer_sizes"), 3);
  const int ni = static_cast<int>(sizes[0]);
  const int nh = static_cast<int>(sizes[1]);
  const int no = static_cast<int>(sizes[2]);
  if (ni < 1 || nh < 1 || no < 1) throw DataError(path + ": bad layer sizes");

  std::string activation = need("activation");
  activation.erase(std::remove(activation.begin(), activation.end(), ' '),
                   activation.end());
  if (activation != "sigmoid")
    throw DataError(path + ": unsupported activation '" + activation + "'");

  nn::NetworkModel model;
  model.w_ih.resize(nh, ni);
  model.b_h.resize(nh);
  model.w_ho.resize(no, nh);
  model.b_o.resize(no);

  const auto mean = parse_values(path, need("feature_mean"), ni);
  const auto scale = parse_values(path, need("feature_scale"), ni);
  model.transform.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), ni);
  model.transform.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), ni);

  fill_row_major(model.w_ih, parse_values(path, need("weights_ih"), nh * ni));
  const auto bh = parse_values(path, need("bias_h"), nh);
  model.b_h = Eigen::Map<const Eigen::VectorXd>(bh.data(), nh);
  fill_row_major(model.w_ho, parse_values(path, need("weights_ho"), no * nh));
  const auto bo = parse_values(path, need("bias_o"), no);
  model.b_o = Eigen::Map<const Eigen::VectorXd>(bo.data(), no);

  if (entries.count("pruned_mask_ih") || entries.count("pruned_mask_ho")) {
    model.mask_ih.resize(nh, ni);
    model.mask_ho.resize(no, nh);
    fill_row_major(model.mask_ih, parse_values(path, need("pruned_mask_ih"), nh * ni));
    fill_row_major(model.mask_ho, parse_values(path, need("pruned_mask_ho"), no * nh));
  }
  if (entries.count("train_config_echo")) {
    std::string echo = entries["train_config_echo"];
    if (!echo.empty() && echo.front() == ' ') echo.erase(echo.begin());
    model.train_config_echo = echo;
  }
  return model;
}

}  // namespace fpq::io
