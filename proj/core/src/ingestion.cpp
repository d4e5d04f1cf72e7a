#include "mltrust/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include "mltrust/csv.hpp"
#include "mltrust/errors.hpp"

namespace mltrust {
namespace {

constexpr char kListSeparator = ';';

const std::vector<std::string> kDoctorColumns = {
    "id",           "name",
    "hospital_ids", "department_ids",
    "qualification_score", "overall_experience_years",
    "specialist_experience_years", "like_pct",
    "vote_count",   "review_count",
    "verified",     "claimed"};
const std::vector<std::string> kHospitalColumns = {
    "id", "name", "rating", "stories_count", "accreditation", "location_category",
    "department_ids"};
const std::vector<std::string> kDepartmentColumns = {"id", "name", "doctor_ids",
                                                     "hospital_ids"};

// Reads one row through the column indices resolved from the header.
class RowReader {
 public:
  RowReader(const CsvTable& table, const std::vector<std::string>& columns,
            std::string_view source)
      : table_(table), source_(source) {
    for (const auto& c : columns) index_.push_back(table.column(c, source));
  }

  void seek(std::size_t row) { row_ = row; }

  std::string_view text(std::size_t col) const {
    return trim(table_.rows[row_][index_[col]]);
  }

  [[noreturn]] void fail(const std::string& reason) const {
    throw Error(ErrorCode::kMalformedRow, std::string(source_) + ":" +
                                              std::to_string(table_.line_numbers[row_]) +
                                              ": " + reason);
  }

  std::string required_id(std::size_t col) const {
    auto t = text(col);
    if (t.empty()) fail("empty id");
    return std::string(t);
  }

  std::optional<double> number(std::size_t col, double lo, double hi) const {
    auto t = text(col);
    if (t.empty()) return std::nullopt;
    auto v = parse_double(t);
    if (!v) fail("'" + std::string(t) + "' is not a number");
    if (*v < lo || *v > hi) {
      fail(std::string(column_name(col)) + " value " + std::string(t) + " out of range [" +
           format_double(lo) + ", " + format_double(hi) + "]");
    }
    return v;
  }

  std::int64_t count(std::size_t col) const {
    auto t = text(col);
    if (t.empty()) return 0;
    auto v = parse_integer(t);
    if (!v || *v < 0) fail("'" + std::string(t) + "' is not a non-negative integer");
    return *v;
  }

  bool flag(std::size_t col) const {
    std::string t(text(col));
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t.empty() || t == "false" || t == "0" || t == "no" || t == "n") return false;
    if (t == "true" || t == "1" || t == "yes" || t == "y") return true;
    fail("'" + t + "' is not a boolean");
  }

  // "A;B:2.5;C" -> ids {A,B,C}, weights {B: 2.5}.
  void id_list(std::size_t col, std::set<std::string>& ids,
               std::map<std::string, double>* weights, bool integer_weights) const {
    std::string_view cell = text(col);
    while (!cell.empty()) {
      const auto cut = cell.find(kListSeparator);
      std::string_view item = trim(cell.substr(0, cut));
      cell = cut == std::string_view::npos ? std::string_view{} : cell.substr(cut + 1);
      if (item.empty()) continue;
      std::string_view id = item;
      std::optional<double> weight;
      if (const auto colon = item.find(':'); colon != std::string_view::npos) {
        if (weights == nullptr) fail("weights are not allowed in this list");
        id = trim(item.substr(0, colon));
        weight = parse_double(item.substr(colon + 1));
        if (!weight || *weight < 0.0) fail("bad weight in list entry '" + std::string(item) + "'");
        if (integer_weights && *weight != static_cast<double>(static_cast<long long>(*weight))) {
          fail("doctor count must be an integer in '" + std::string(item) + "'");
        }
      }
      if (id.empty()) fail("empty id in list");
      if (!ids.insert(std::string(id)).second) {
        fail("duplicate id '" + std::string(id) + "' in list");
      }
      if (weight) (*weights)[std::string(id)] = *weight;
    }
  }

 private:
  std::string_view column_name(std::size_t col) const {
    return table_.header[index_[col]];
  }

  const CsvTable& table_;
  std::string_view source_;
  std::vector<std::size_t> index_;
  std::size_t row_ = 0;
};

template <typename Record>
void insert_unique(std::map<std::string, Record>& into, Record record,
                   const RowReader& reader) {
  const std::string id = record.id;
  if (!into.emplace(id, std::move(record)).second) reader.fail("duplicate id '" + id + "'");
}

std::optional<LocationCategory> parse_location(const RowReader& reader, std::size_t col) {
  std::string t(reader.text(col));
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t.empty()) return std::nullopt;
  if (t == "urban") return LocationCategory::kUrban;
  if (t == "suburban") return LocationCategory::kSuburban;
  if (t == "rural") return LocationCategory::kRural;
  reader.fail("unknown location category '" + t + "'");
}

std::string join_ids(const std::set<std::string>& ids,
                     const std::map<std::string, double>* weights = nullptr) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += kListSeparator;
    out += id;
    if (weights) {
      if (auto it = weights->find(id); it != weights->end()) {
        out += ':';
        out += format_double(it->second);
      }
    }
  }
  return out;
}

std::string opt_number(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

bool doctor_is_usable(const DoctorRecord& d) {
  return d.verified && d.claimed && !d.hospital_ids.empty() && !d.department_ids.empty() &&
         d.qualification_score.has_value() && d.overall_experience_years.has_value();
}

template <typename Map, typename Pred>
bool erase_if_changed(Map& map, Pred pred) {
  return std::erase_if(map, pred) > 0;
}

bool drop_unknown(std::set<std::string>& ids, const auto& known,
                  std::map<std::string, double>* weights = nullptr) {
  bool changed = false;
  for (auto it = ids.begin(); it != ids.end();) {
    if (!known.contains(*it)) {
      if (weights) weights->erase(*it);
      it = ids.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  return changed;
}

}  // namespace

std::string_view location_name(LocationCategory category) {
  switch (category) {
    case LocationCategory::kUrban: return "Urban";
    case LocationCategory::kSuburban: return "Suburban";
    case LocationCategory::kRural: return "Rural";
  }
  return "";
}

EntityStore parse_store(std::istream& doctors, std::istream& hospitals,
                        std::istream& departments) {
  EntityStore store;

  const CsvTable doc_table = read_csv(doctors, "doctors.csv");
  RowReader doc(doc_table, kDoctorColumns, "doctors.csv");
  for (std::size_t r = 0; r < doc_table.rows.size(); ++r) {
    doc.seek(r);
    DoctorRecord d;
    d.id = doc.required_id(0);
    d.name = std::string(doc.text(1));
    doc.id_list(2, d.hospital_ids, nullptr, false);
    doc.id_list(3, d.department_ids, nullptr, false);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    d.qualification_score = doc.number(4, 0.0, kInf);
    d.overall_experience_years = doc.number(5, 0.0, kInf);
    d.specialist_experience_years = doc.number(6, 0.0, kInf);
    d.like_pct = doc.number(7, 0.0, 100.0);
    d.vote_count = doc.count(8);
    d.review_count = doc.count(9);
    d.verified = doc.flag(10);
    d.claimed = doc.flag(11);
    if (d.specialist_experience_years && d.overall_experience_years &&
        *d.specialist_experience_years > *d.overall_experience_years) {
      doc.fail("specialist experience exceeds overall experience");
    }
    insert_unique(store.doctors, std::move(d), doc);
  }

  const CsvTable hosp_table = read_csv(hospitals, "hospitals.csv");
  RowReader hosp(hosp_table, kHospitalColumns, "hospitals.csv");
  for (std::size_t r = 0; r < hosp_table.rows.size(); ++r) {
    hosp.seek(r);
    HospitalRecord h;
    h.id = hosp.required_id(0);
    h.name = std::string(hosp.text(1));
    h.rating = hosp.number(2, 0.0, 5.0);
    h.stories_count = hosp.count(3);
    if (auto acc = hosp.text(4); !acc.empty()) h.accreditation = std::string(acc);
    h.location_category = parse_location(hosp, 5);
    hosp.id_list(6, h.department_ids, &h.department_doctor_counts, true);
    insert_unique(store.hospitals, std::move(h), hosp);
  }

  const CsvTable dept_table = read_csv(departments, "departments.csv");
  RowReader dept(dept_table, kDepartmentColumns, "departments.csv");
  for (std::size_t r = 0; r < dept_table.rows.size(); ++r) {
    dept.seek(r);
    DepartmentRecord d;
    d.id = dept.required_id(0);
    d.name = std::string(dept.text(1));
    dept.id_list(2, d.doctor_ids, &d.doctor_weights, false);
    dept.id_list(3, d.hospital_ids, nullptr, false);
    insert_unique(store.departments, std::move(d), dept);
  }

  store.provenance.raw_doctors = store.doctors.size();
  store.provenance.raw_hospitals = store.hospitals.size();
  store.provenance.raw_departments = store.departments.size();
  return store;
}

EntityStore parse_store(const std::filesystem::path& doctor_file,
                        const std::filesystem::path& hospital_file,
                        const std::filesystem::path& department_file) {
  auto doctors = open_input(doctor_file);
  auto hospitals = open_input(hospital_file);
  auto departments = open_input(department_file);
  return parse_store(doctors, hospitals, departments);
}

void write_store(const EntityStore& store, std::ostream& doctors, std::ostream& hospitals,
                 std::ostream& departments) {
  write_schema_preamble(doctors);
  write_csv_row(doctors, kDoctorColumns);
  for (const auto& [id, d] : store.doctors) {
    write_csv_row(doctors, {d.id, d.name, join_ids(d.hospital_ids),
                            join_ids(d.department_ids), opt_number(d.qualification_score),
                            opt_number(d.overall_experience_years),
                            opt_number(d.specialist_experience_years),
                            opt_number(d.like_pct), std::to_string(d.vote_count),
                            std::to_string(d.review_count), d.verified ? "true" : "false",
                            d.claimed ? "true" : "false"});
  }

  write_schema_preamble(hospitals);
  write_csv_row(hospitals, kHospitalColumns);
  for (const auto& [id, h] : store.hospitals) {
    write_csv_row(hospitals,
                  {h.id, h.name, opt_number(h.rating), std::to_string(h.stories_count),
                   h.accreditation.value_or(""),
                   h.location_category ? std::string(location_name(*h.location_category))
                                       : std::string(),
                   join_ids(h.department_ids, &h.department_doctor_counts)});
  }

  write_schema_preamble(departments);
  write_csv_row(departments, kDepartmentColumns);
  for (const auto& [id, d] : store.departments) {
    write_csv_row(departments, {d.id, d.name, join_ids(d.doctor_ids, &d.doctor_weights),
                                join_ids(d.hospital_ids)});
  }
}

std::set<std::string> department_doctors(const EntityStore& store,
                                         const DepartmentRecord& dept) {
  std::set<std::string> members = dept.doctor_ids;
  for (const auto& [id, doctor] : store.doctors) {
    if (doctor.department_ids.contains(dept.id)) members.insert(id);
  }
  return members;
}

std::set<std::string> hospital_departments(const EntityStore& store,
                                           const HospitalRecord& hospital) {
  std::set<std::string> depts = hospital.department_ids;
  for (const auto& [id, dept] : store.departments) {
    if (dept.hospital_ids.contains(hospital.id)) depts.insert(id);
  }
  return depts;
}

EntityStore clean(EntityStore store) {
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= erase_if_changed(store.doctors,
                                [](const auto& kv) { return !doctor_is_usable(kv.second); });
    changed |= erase_if_changed(store.hospitals,
                                [](const auto& kv) { return !kv.second.rating.has_value(); });
    for (auto& [id, d] : store.doctors) {
      changed |= drop_unknown(d.hospital_ids, store.hospitals);
      changed |= drop_unknown(d.department_ids, store.departments);
    }
    for (auto& [id, d] : store.departments) {
      changed |= drop_unknown(d.doctor_ids, store.doctors, &d.doctor_weights);
      changed |= drop_unknown(d.hospital_ids, store.hospitals);
    }
    for (auto& [id, h] : store.hospitals) {
      changed |= drop_unknown(h.department_ids, store.departments, &h.department_doctor_counts);
    }
    changed |= erase_if_changed(store.departments, [&store](const auto& kv) {
      return department_doctors(store, kv.second).empty();
    });
  }
  for (auto& [id, dept] : store.departments) {
    dept.derived_rating = derive_department_rating(dept, store);
  }
  store.provenance.filtered_doctors = store.doctors.size();
  store.provenance.filtered_hospitals = store.hospitals.size();
  store.provenance.filtered_departments = store.departments.size();
  return store;
}

double like_pct_to_rating(double like_pct) {
  if (!(like_pct >= 0.0 && like_pct <= 100.0)) {
    throw Error(ErrorCode::kOutOfRange,
                "like percentage " + format_double(like_pct) + " outside [0, 100]");
  }
  return like_pct / 20.0;
}

double derive_department_rating(const DepartmentRecord& dept, const EntityStore& store) {
  double weighted = 0.0;
  double plain = 0.0;
  double reviews = 0.0;
  std::size_t rated = 0;
  for (const auto& id : department_doctors(store, dept)) {
    auto it = store.doctors.find(id);
    if (it == store.doctors.end() || !it->second.like_pct) continue;
    const double rating = like_pct_to_rating(*it->second.like_pct);
    const auto n = static_cast<double>(it->second.review_count);
    weighted += rating * n;
    reviews += n;
    plain += rating;
    ++rated;
  }
  if (rated == 0) return 0.0;
  if (reviews > 0.0) return weighted / reviews;
  return plain / static_cast<double>(rated);
}

LayerProfile layer_profile(const EntityStore& store, LayerId layer) {
  LayerProfile profile;
  profile.layer = layer;
  auto add = [&profile](const std::string& name, double value) {
    profile.features[name].push_back(value);
  };
  switch (layer) {
    case LayerId::kHospital:
      for (const auto& [id, h] : store.hospitals) {
        profile.ids.push_back(id);
        profile.ratings.push_back(h.rating);
        const auto doctors = std::count_if(
            store.doctors.begin(), store.doctors.end(),
            [&id](const auto& kv) { return kv.second.hospital_ids.contains(id); });
        add("doctor_count", static_cast<double>(doctors));
        add("department_count", static_cast<double>(hospital_departments(store, h).size()));
        add("stories_count", static_cast<double>(h.stories_count));
      }
      break;
    case LayerId::kDepartment:
      for (const auto& [id, d] : store.departments) {
        profile.ids.push_back(id);
        profile.ratings.push_back(d.derived_rating ? d.derived_rating
                                                   : derive_department_rating(d, store));
        const auto members = department_doctors(store, d);
        double reviews = 0.0;
        for (const auto& m : members) {
          if (auto it = store.doctors.find(m); it != store.doctors.end()) {
            reviews += static_cast<double>(it->second.review_count);
          }
        }
        add("doctor_count", static_cast<double>(members.size()));
        add("doctor_review_count", reviews);
      }
      break;
    case LayerId::kDoctor:
      for (const auto& [id, d] : store.doctors) {
        profile.ids.push_back(id);
        profile.ratings.push_back(d.like_pct ? std::optional(like_pct_to_rating(*d.like_pct))
                                             : std::nullopt);
        add("vote_count", static_cast<double>(d.vote_count));
        add("review_count", static_cast<double>(d.review_count));
        add("overall_experience", d.overall_experience_years.value_or(0.0));
        add("specialist_experience", d.specialist_experience_years.value_or(0.0));
        add("qualification", d.qualification_score.value_or(0.0));
      }
      break;
  }
  return profile;
}

}  // namespace mltrust
