// Copyright 2026 The demotraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "demotraj/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>
#include <utility>

#include <hdf5.h>
#include <openssl/evp.h>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

constexpr const char* kObservations = "/observations";
constexpr const char* kImages = "/observations/images";
constexpr const char* kQpos = "/observations/qpos";
constexpr const char* kAction = "/action";
constexpr const char* kGripperWidth = "/observations/gripper_width";
constexpr const char* kTimestamps = "/observations/timestamps";
constexpr const char* kSimAttr = "sim";
constexpr const char* kRepresentationAttr = "representation";
constexpr const char* kInitialPoseAttr = "initial_pose";
constexpr const char* kResolutionAttr = "source_resolution_hw";

void SilenceHdf5() { H5Eset_auto2(H5E_DEFAULT, nullptr, nullptr); }

// Owns an HDF5 identifier.
class Handle {
 public:
  using Closer = herr_t (*)(hid_t);

  Handle() = default;
  Handle(hid_t id, Closer closer) : id_(id), closer_(closer) {}
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : id_(std::exchange(o.id_, -1)), closer_(o.closer_) {}
  Handle& operator=(Handle&& o) noexcept {
    reset();
    id_ = std::exchange(o.id_, -1);
    closer_ = o.closer_;
    return *this;
  }
  ~Handle() { reset(); }

  hid_t get() const { return id_; }
  bool valid() const { return id_ >= 0; }
  void reset() {
    if (id_ >= 0 && closer_ != nullptr) closer_(id_);
    id_ = -1;
  }

 private:
  hid_t id_ = -1;
  Closer closer_ = nullptr;
};

Handle Checked(hid_t id, Handle::Closer closer, const std::string& what) {
  if (id < 0) throw IoError("HDF5: " + what);
  return Handle(id, closer);
}

void Check(herr_t status, const std::string& what) {
  if (status < 0) throw IoError("HDF5: " + what);
}

Handle Property(hid_t cls) { return Checked(H5Pcreate(cls), H5Pclose, "property list"); }

Handle GroupCreateProps() {
  Handle p = Property(H5P_GROUP_CREATE);
  Check(H5Pset_obj_track_times(p.get(), false), "track times");
  return p;
}

Handle DatasetCreateProps() {
  Handle p = Property(H5P_DATASET_CREATE);
  Check(H5Pset_layout(p.get(), H5D_CONTIGUOUS), "layout");
  Check(H5Pset_obj_track_times(p.get(), false), "track times");
  return p;
}

Handle Space(const std::vector<hsize_t>& dims) {
  if (dims.empty()) return Checked(H5Screate(H5S_SCALAR), H5Sclose, "dataspace");
  return Checked(H5Screate_simple(static_cast<int>(dims.size()), dims.data(), nullptr),
                 H5Sclose, "dataspace");
}

Handle Utf8StringType() {
  Handle t = Checked(H5Tcopy(H5T_C_S1), H5Tclose, "string type");
  Check(H5Tset_size(t.get(), H5T_VARIABLE), "string size");
  Check(H5Tset_cset(t.get(), H5T_CSET_UTF8), "string charset");
  return t;
}

// The encoding h5py uses for numpy.bool_.
Handle BoolEnumType() {
  Handle t = Checked(H5Tenum_create(H5T_NATIVE_INT8), H5Tclose, "bool type");
  const std::int8_t f = 0;
  const std::int8_t tr = 1;
  Check(H5Tenum_insert(t.get(), "FALSE", &f), "enum member");
  Check(H5Tenum_insert(t.get(), "TRUE", &tr), "enum member");
  return t;
}

Handle CreateGroup(hid_t loc, const std::string& path) {
  Handle gcpl = GroupCreateProps();
  return Checked(H5Gcreate2(loc, path.c_str(), H5P_DEFAULT, gcpl.get(), H5P_DEFAULT),
                 H5Gclose, "create group " + path);
}

bool LinkExists(hid_t loc, const std::string& path) {
  // H5Lexists needs every intermediate link to exist.
  std::string prefix;
  std::size_t start = path.front() == '/' ? 1 : 0;
  if (start == 1) prefix = "/";
  while (start <= path.size()) {
    const std::size_t slash = path.find('/', start);
    const std::string part =
        path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    prefix += part;
    if (H5Lexists(loc, prefix.c_str(), H5P_DEFAULT) <= 0) return false;
    if (slash == std::string::npos) break;
    prefix += '/';
    start = slash + 1;
  }
  return true;
}

void EnsureGroups(hid_t file, const std::string& dataset_path) {
  std::size_t pos = 1;
  while (true) {
    const std::size_t slash = dataset_path.find('/', pos);
    if (slash == std::string::npos) return;
    const std::string group = dataset_path.substr(0, slash);
    if (!LinkExists(file, group)) CreateGroup(file, group);
    pos = slash + 1;
  }
}

void WriteDataset(hid_t loc, const std::string& path, hid_t file_type, hid_t mem_type,
                  const std::vector<hsize_t>& dims, const void* data) {
  Handle space = Space(dims);
  Handle dcpl = DatasetCreateProps();
  Handle ds = Checked(H5Dcreate2(loc, path.c_str(), file_type, space.get(), H5P_DEFAULT,
                                 dcpl.get(), H5P_DEFAULT),
                      H5Dclose, "create dataset " + path);
  Check(H5Dwrite(ds.get(), mem_type, H5S_ALL, H5S_ALL, H5P_DEFAULT, data),
        "write dataset " + path);
}

void WriteAttribute(hid_t obj, const char* name, hid_t file_type, hid_t mem_type,
                    const std::vector<hsize_t>& dims, const void* data) {
  Handle space = Space(dims);
  Handle attr = Checked(H5Acreate2(obj, name, file_type, space.get(), H5P_DEFAULT,
                                   H5P_DEFAULT),
                        H5Aclose, std::string("create attribute ") + name);
  Check(H5Awrite(attr.get(), mem_type, data), std::string("write attribute ") + name);
}

void WriteStringAttribute(hid_t obj, const char* name, const std::string& value) {
  Handle t = Utf8StringType();
  const char* ptr = value.c_str();
  WriteAttribute(obj, name, t.get(), t.get(), {}, &ptr);
}

void WriteMatrix(hid_t file, const std::string& path, const RowMatrix& m) {
  WriteDataset(file, path, H5T_IEEE_F64LE, H5T_NATIVE_DOUBLE,
               {static_cast<hsize_t>(m.rows()), static_cast<hsize_t>(m.cols())}, m.data());
}

void WriteCamera(hid_t images, const CameraImages& cam) {
  if (cam.name.empty() || cam.name.find('/') != std::string::npos) {
    throw InputError("invalid camera name '" + cam.name + "'");
  }
  if (const auto* stack = std::get_if<ImageStack>(&cam.data)) {
    if (stack->pixels.size() != stack->frames * stack->height * stack->width * 3) {
      throw InputError("camera '" + cam.name + "' pixel buffer does not match its shape");
    }
    WriteDataset(images, cam.name, H5T_STD_U8LE, H5T_NATIVE_UINT8,
                 {stack->frames, stack->height, stack->width, 3}, stack->pixels.data());
  } else {
    const auto& refs = std::get<std::vector<std::string>>(cam.data);
    std::vector<const char*> ptrs;
    ptrs.reserve(refs.size());
    for (const auto& r : refs) ptrs.push_back(r.c_str());
    Handle t = Utf8StringType();
    WriteDataset(images, cam.name, t.get(), t.get(), {refs.size()}, ptrs.data());
  }
  Handle ds = Checked(H5Dopen2(images, cam.name.c_str(), H5P_DEFAULT), H5Dclose,
                      "open dataset " + cam.name);
  WriteAttribute(ds.get(), kResolutionAttr, H5T_STD_I64LE, H5T_NATIVE_INT64, {2},
                 cam.source_resolution_hw.data());
}

void WriteExtra(hid_t file, const ExtraDataset& extra) {
  if (extra.path.empty() || extra.path.front() != '/') {
    throw InputError("extra dataset path must be absolute: '" + extra.path + "'");
  }
  Handle type = Checked(H5Tdecode(extra.datatype.data()), H5Tclose,
                        "decode datatype of " + extra.path);
  std::vector<hsize_t> dims(extra.dims.begin(), extra.dims.end());
  hsize_t count = 1;
  for (hsize_t d : dims) count *= d;
  if (count * H5Tget_size(type.get()) != extra.bytes.size()) {
    throw InputError("extra dataset " + extra.path + " byte count does not match its shape");
  }
  EnsureGroups(file, extra.path);
  WriteDataset(file, extra.path, type.get(), type.get(), dims, extra.bytes.data());
}

void WriteContents(hid_t file, const Episode& ep) {
  if (ep.cameras.empty()) throw InputError("episode has no camera");
  if (ep.qpos.rows() == 0 || ep.action.rows() == 0) {
    throw InputError("episode qpos and action must have at least one row");
  }
  CreateGroup(file, kObservations);
  Handle images = CreateGroup(file, kImages);
  std::set<std::string> names;
  for (const auto& cam : ep.cameras) {
    if (!names.insert(cam.name).second) {
      throw InputError("duplicate camera name '" + cam.name + "'");
    }
    WriteCamera(images.get(), cam);
  }

  WriteMatrix(file, kQpos, ep.qpos);
  {
    Handle qpos = Checked(H5Dopen2(file, kQpos, H5P_DEFAULT), H5Dclose, "open qpos");
    WriteStringAttribute(qpos.get(), kRepresentationAttr,
                         std::string(to_string(ep.representation)));
    if (ep.initial_pose) {
      const auto row = ep.initial_pose->to_row();
      WriteAttribute(qpos.get(), kInitialPoseAttr, H5T_IEEE_F64LE, H5T_NATIVE_DOUBLE,
                     {7}, row.data());
    }
  }
  if (ep.gripper_width) {
    WriteDataset(file, kGripperWidth, H5T_IEEE_F64LE, H5T_NATIVE_DOUBLE,
                 {ep.gripper_width->size(), 1}, ep.gripper_width->data());
  }
  if (ep.timestamps) {
    WriteDataset(file, kTimestamps, H5T_IEEE_F64LE, H5T_NATIVE_DOUBLE,
                 {ep.timestamps->size()}, ep.timestamps->data());
  }
  WriteMatrix(file, kAction, ep.action);
  for (const auto& extra : ep.extras) WriteExtra(file, extra);

  if (ep.sim) {
    Handle t = BoolEnumType();
    const std::int8_t v = *ep.sim ? 1 : 0;
    WriteAttribute(file, kSimAttr, t.get(), t.get(), {}, &v);
  }
}

// ---- reading ----

std::vector<hsize_t> Dims(hid_t ds) {
  Handle space = Checked(H5Dget_space(ds), H5Sclose, "dataspace");
  const int rank = H5Sget_simple_extent_ndims(space.get());
  if (rank < 0) throw IoError("HDF5: dataspace rank");
  std::vector<hsize_t> dims(static_cast<std::size_t>(rank));
  if (rank > 0) H5Sget_simple_extent_dims(space.get(), dims.data(), nullptr);
  return dims;
}

Handle OpenDataset(hid_t file, const std::string& path) {
  if (!LinkExists(file, path)) throw SchemaError(path, "required dataset is missing");
  Handle obj = Checked(H5Oopen(file, path.c_str(), H5P_DEFAULT), H5Oclose, "open " + path);
  if (H5Iget_type(obj.get()) != H5I_DATASET) throw SchemaError(path, "not a dataset");
  return Checked(H5Dopen2(file, path.c_str(), H5P_DEFAULT), H5Dclose, "open " + path);
}

H5T_class_t TypeClass(hid_t ds) {
  Handle t = Checked(H5Dget_type(ds), H5Tclose, "datatype");
  return H5Tget_class(t.get());
}

std::vector<double> ReadDoubles(hid_t ds, const std::string& path) {
  if (TypeClass(ds) != H5T_FLOAT && TypeClass(ds) != H5T_INTEGER) {
    throw SchemaError(path, "expected a numeric dataset");
  }
  hsize_t n = 1;
  for (hsize_t d : Dims(ds)) n *= d;
  std::vector<double> out(n);
  if (n > 0) {
    Check(H5Dread(ds, H5T_NATIVE_DOUBLE, H5S_ALL, H5S_ALL, H5P_DEFAULT, out.data()),
          "read " + path);
  }
  return out;
}

RowMatrix ReadMatrix(hid_t file, const std::string& path) {
  Handle ds = OpenDataset(file, path);
  const auto dims = Dims(ds.get());
  if (dims.size() != 2) throw SchemaError(path, "expected a 2-D dataset");
  const auto values = ReadDoubles(ds.get(), path);
  RowMatrix m(static_cast<Eigen::Index>(dims[0]), static_cast<Eigen::Index>(dims[1]));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

std::vector<std::string> ReadStrings(hid_t ds, const std::string& path) {
  Handle ftype = Checked(H5Dget_type(ds), H5Tclose, "datatype");
  const auto dims = Dims(ds);
  if (dims.size() != 1) throw SchemaError(path, "expected a 1-D string dataset");
  std::vector<std::string> out;
  out.reserve(dims[0]);
  if (H5Tis_variable_str(ftype.get()) > 0) {
    Handle mtype = Utf8StringType();
    std::vector<char*> ptrs(dims[0], nullptr);
    Check(H5Dread(ds, mtype.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT, ptrs.data()),
          "read " + path);
    for (char* p : ptrs) out.emplace_back(p != nullptr ? p : "");
    Handle space = Checked(H5Dget_space(ds), H5Sclose, "dataspace");
    H5Dvlen_reclaim(mtype.get(), space.get(), H5P_DEFAULT, ptrs.data());
  } else {
    const std::size_t size = H5Tget_size(ftype.get());
    std::vector<char> buf(size * dims[0]);
    Check(H5Dread(ds, ftype.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT, buf.data()),
          "read " + path);
    for (hsize_t i = 0; i < dims[0]; ++i) {
      const char* p = buf.data() + i * size;
      out.emplace_back(p, strnlen(p, size));
    }
  }
  return out;
}

std::optional<std::string> ReadStringAttribute(hid_t obj, const char* name) {
  if (H5Aexists(obj, name) <= 0) return std::nullopt;
  Handle attr = Checked(H5Aopen(obj, name, H5P_DEFAULT), H5Aclose, name);
  Handle ftype = Checked(H5Aget_type(attr.get()), H5Tclose, "attribute type");
  if (H5Tget_class(ftype.get()) != H5T_STRING) return std::nullopt;
  if (H5Tis_variable_str(ftype.get()) > 0) {
    Handle mtype = Utf8StringType();
    char* p = nullptr;
    Check(H5Aread(attr.get(), mtype.get(), &p), name);
    std::string out = p != nullptr ? p : "";
    Handle space = Checked(H5Aget_space(attr.get()), H5Sclose, "dataspace");
    H5Dvlen_reclaim(mtype.get(), space.get(), H5P_DEFAULT, &p);
    return out;
  }
  const std::size_t size = H5Tget_size(ftype.get());
  std::vector<char> buf(size + 1, '\0');
  Check(H5Aread(attr.get(), ftype.get(), buf.data()), name);
  return std::string(buf.data(), strnlen(buf.data(), size));
}

template <typename T>
std::optional<std::vector<T>> ReadNumericAttribute(hid_t obj, const char* name,
                                                   hid_t mem_type) {
  if (H5Aexists(obj, name) <= 0) return std::nullopt;
  Handle attr = Checked(H5Aopen(obj, name, H5P_DEFAULT), H5Aclose, name);
  Handle space = Checked(H5Aget_space(attr.get()), H5Sclose, "dataspace");
  const hssize_t n = H5Sget_simple_extent_npoints(space.get());
  if (n < 0) throw IoError(std::string("HDF5: attribute size ") + name);
  std::vector<T> out(static_cast<std::size_t>(n));
  Check(H5Aread(attr.get(), mem_type, out.data()), name);
  return out;
}

std::optional<bool> ReadSim(hid_t file) {
  if (H5Aexists(file, kSimAttr) <= 0) return std::nullopt;
  Handle attr = Checked(H5Aopen(file, kSimAttr, H5P_DEFAULT), H5Aclose, kSimAttr);
  Handle ftype = Checked(H5Aget_type(attr.get()), H5Tclose, "sim type");
  const H5T_class_t cls = H5Tget_class(ftype.get());
  std::int64_t value = 0;
  if (cls == H5T_ENUM) {
    Handle mtype = Checked(H5Tget_native_type(ftype.get(), H5T_DIR_ASCEND), H5Tclose,
                           "sim native type");
    const std::size_t size = H5Tget_size(mtype.get());
    if (size > sizeof(value)) throw SchemaError("@sim", "enum base type too wide");
    std::vector<unsigned char> buf(size);
    Check(H5Aread(attr.get(), mtype.get(), buf.data()), "read sim");
    std::int64_t raw = 0;
    // Little-endian hosts only; every supported platform qualifies.
    std::copy(buf.begin(), buf.end(), reinterpret_cast<unsigned char*>(&raw));
    value = raw;
  } else if (cls == H5T_INTEGER) {
    Check(H5Aread(attr.get(), H5T_NATIVE_INT64, &value), "read sim");
  } else {
    throw SchemaError("@sim", "expected a boolean attribute");
  }
  return value != 0;
}

CameraImages ReadCamera(hid_t file, const std::string& name) {
  const std::string path = std::string(kImages) + "/" + name;
  Handle ds = OpenDataset(file, path);
  CameraImages cam;
  cam.name = name;
  const H5T_class_t cls = TypeClass(ds.get());
  if (cls == H5T_STRING) {
    cam.data = ReadStrings(ds.get(), path);
  } else if (cls == H5T_INTEGER) {
    Handle ftype = Checked(H5Dget_type(ds.get()), H5Tclose, "datatype");
    if (H5Tget_size(ftype.get()) != 1 || H5Tget_sign(ftype.get()) != H5T_SGN_NONE) {
      throw SchemaError(path, "images must be unsigned 8-bit");
    }
    const auto dims = Dims(ds.get());
    if (dims.size() != 4 || dims[3] != 3) {
      throw SchemaError(path, "images must have shape (T, H, W, 3)");
    }
    ImageStack stack{dims[0], dims[1], dims[2], {}};
    stack.pixels.resize(dims[0] * dims[1] * dims[2] * 3);
    if (!stack.pixels.empty()) {
      Check(H5Dread(ds.get(), H5T_NATIVE_UINT8, H5S_ALL, H5S_ALL, H5P_DEFAULT,
                    stack.pixels.data()),
            "read " + path);
    }
    cam.data = std::move(stack);
  } else {
    throw SchemaError(path, "images must be uint8 frames or string references");
  }
  if (auto hw = ReadNumericAttribute<std::int64_t>(ds.get(), kResolutionAttr,
                                                    H5T_NATIVE_INT64)) {
    if (hw->size() != 2) throw SchemaError(path, "source_resolution_hw must hold 2 values");
    cam.source_resolution_hw = {(*hw)[0], (*hw)[1]};
  }
  return cam;
}

std::vector<std::string> ChildNames(hid_t group) {
  H5G_info_t info;
  Check(H5Gget_info(group, &info), "group info");
  std::vector<std::string> names;
  for (hsize_t i = 0; i < info.nlinks; ++i) {
    const ssize_t len = H5Lget_name_by_idx(group, ".", H5_INDEX_NAME, H5_ITER_INC, i,
                                           nullptr, 0, H5P_DEFAULT);
    if (len < 0) throw IoError("HDF5: link name");
    std::string name(static_cast<std::size_t>(len), '\0');
    H5Lget_name_by_idx(group, ".", H5_INDEX_NAME, H5_ITER_INC, i, name.data(),
                       static_cast<std::size_t>(len) + 1, H5P_DEFAULT);
    names.push_back(std::move(name));
  }
  return names;
}

struct VisitEntry {
  std::string path;
  H5I_type_t kind;
};

herr_t CollectLink(hid_t group, const char* name, const H5L_info_t* /*info*/, void* data) {
  auto* out = static_cast<std::vector<VisitEntry>*>(data);
  const hid_t obj = H5Oopen(group, name, H5P_DEFAULT);
  if (obj < 0) return 0;  // dangling or external link
  out->push_back({std::string("/") + name, H5Iget_type(obj)});
  H5Oclose(obj);
  return 0;
}

std::vector<VisitEntry> VisitAll(hid_t file) {
  std::vector<VisitEntry> entries;
  Check(H5Lvisit(file, H5_INDEX_NAME, H5_ITER_INC, CollectLink, &entries), "visit");
  return entries;
}

herr_t CollectAttr(hid_t /*loc*/, const char* name, const H5A_info_t* /*info*/,
                   void* data) {
  static_cast<std::vector<std::string>*>(data)->push_back(std::string("@") + name);
  return 0;
}

bool IsKnownPath(const std::string& path) {
  return path == kQpos || path == kAction || path == kGripperWidth ||
         path == kTimestamps || path.rfind(std::string(kImages) + "/", 0) == 0;
}

ExtraDataset ReadExtra(hid_t file, const std::string& path, bool* preserved) {
  Handle ds = Checked(H5Dopen2(file, path.c_str(), H5P_DEFAULT), H5Dclose, "open " + path);
  Handle type = Checked(H5Dget_type(ds.get()), H5Tclose, "datatype");
  ExtraDataset extra;
  extra.path = path;
  *preserved = !(H5Tdetect_class(type.get(), H5T_VLEN) > 0 ||
                 H5Tis_variable_str(type.get()) > 0 ||
                 H5Tdetect_class(type.get(), H5T_REFERENCE) > 0);
  if (!*preserved) return extra;
  std::size_t n = 0;
  Check(H5Tencode(type.get(), nullptr, &n), "encode datatype");
  extra.datatype.resize(n);
  Check(H5Tencode(type.get(), extra.datatype.data(), &n), "encode datatype");
  const auto dims = Dims(ds.get());
  extra.dims.assign(dims.begin(), dims.end());
  hsize_t count = 1;
  for (hsize_t d : dims) count *= d;
  extra.bytes.resize(count * H5Tget_size(type.get()));
  if (!extra.bytes.empty()) {
    Check(H5Dread(ds.get(), type.get(), H5S_ALL, H5S_ALL, H5P_DEFAULT, extra.bytes.data()),
          "read " + path);
  }
  return extra;
}

Handle OpenForRead(const std::filesystem::path& path) {
  SilenceHdf5();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw IoError("episode file not found: " + path.string());
  }
  if (H5Fis_hdf5(path.c_str()) <= 0) {
    throw IoError("not an HDF5 file: " + path.string());
  }
  return Checked(H5Fopen(path.c_str(), H5F_ACC_RDONLY, H5P_DEFAULT), H5Fclose,
                 "open " + path.string());
}

std::string Lengths(const std::vector<std::pair<const char*, std::size_t>>& parts) {
  std::string out;
  for (const auto& [name, n] : parts) {
    if (!out.empty()) out += ", ";
    out += std::string(name) + "=" + std::to_string(n);
  }
  return out;
}

}  // namespace

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::TcpAbsolute:
      return "tcp_absolute";
    case Representation::TcpRelative:
      return "tcp_relative";
    case Representation::Joint:
      return "joint";
  }
  return "unknown";
}

Representation representation_from_string(std::string_view name) {
  if (name == "tcp_absolute") return Representation::TcpAbsolute;
  if (name == "tcp_relative") return Representation::TcpRelative;
  if (name == "joint") return Representation::Joint;
  throw ConfigError("unknown representation '" + std::string(name) +
                    "' (expected tcp_absolute, tcp_relative or joint)");
}

std::size_t CameraImages::frames() const {
  if (const auto* stack = std::get_if<ImageStack>(&data)) return stack->frames;
  return std::get<std::vector<std::string>>(data).size();
}

Episode assemble(const AssemblyInput& in) {
  const std::size_t n = in.synced.size();
  const bool joint_mode = in.mode == Representation::Joint;
  std::vector<std::pair<const char*, std::size_t>> lengths = {{"synced", n}};
  if (!joint_mode || !in.tcp.empty()) lengths.emplace_back("tcp", in.tcp.size());
  if (joint_mode) lengths.emplace_back("joints", in.joints.size());
  if (in.widths != nullptr) lengths.emplace_back("widths", in.widths->widths.size());
  for (const auto& [name, len] : lengths) {
    if (len != n) throw AssemblyError("length mismatch: " + Lengths(lengths));
  }
  if (n == 0) throw AssemblyError("cannot assemble an empty episode");

  Episode ep;
  ep.representation = in.mode;
  ep.sim = false;
  ep.qpos.resize(static_cast<Eigen::Index>(n), kRowWidth);

  CameraImages cam;
  cam.name = in.camera_name;
  std::vector<std::string> refs;
  refs.reserve(n);
  std::vector<double> stamps;
  stamps.reserve(n);
  for (const auto& f : in.synced) {
    refs.push_back(f.camera.image_ref);
    stamps.push_back(f.tick_time);
  }
  cam.data = std::move(refs);
  ep.cameras.push_back(std::move(cam));
  ep.timestamps = std::move(stamps);

  auto set_row = [&](std::size_t i, const std::array<double, 7>& row) {
    for (std::size_t c = 0; c < kRowWidth; ++c) {
      ep.qpos(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c];
    }
  };
  switch (in.mode) {
    case Representation::TcpAbsolute:
      for (std::size_t i = 0; i < n; ++i) set_row(i, in.tcp[i].to_row());
      break;
    case Representation::TcpRelative:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const RelativePose step = relative_step(in.tcp[i], in.tcp[i + 1]);
        set_row(i, Pose{step.translation, step.rotation}.to_row());
      }
      set_row(n - 1, Pose::identity().to_row());
      ep.initial_pose = in.tcp[0];
      break;
    case Representation::Joint:
      for (std::size_t i = 0; i < n; ++i) {
        const JointVector& q = in.joints[i];
        if (static_cast<std::size_t>(q.size()) > kRowWidth) {
          throw AssemblyError("joint vector at frame " + std::to_string(i) + " has " +
                              std::to_string(q.size()) + " entries, at most 7 fit a row");
        }
        std::array<double, 7> row{};
        for (Eigen::Index j = 0; j < q.size(); ++j) row[static_cast<std::size_t>(j)] = q[j];
        set_row(i, row);
      }
      break;
  }
  ep.action = ep.qpos;
  if (in.widths != nullptr) ep.gripper_width = in.widths->widths;
  return ep;
}

void write_episode(const std::filesystem::path& path, const Episode& ep) {
  SilenceHdf5();
  std::filesystem::path tmp = path;
  tmp += ".partial";
  try {
    {
      Handle fcpl = Property(H5P_FILE_CREATE);
      Check(H5Pset_obj_track_times(fcpl.get(), false), "track times");
      Handle file = Checked(H5Fcreate(tmp.c_str(), H5F_ACC_TRUNC, fcpl.get(), H5P_DEFAULT),
                            H5Fclose, "cannot create " + tmp.string());
      WriteContents(file.get(), ep);
      Check(H5Fflush(file.get(), H5F_SCOPE_LOCAL), "flush");
    }
    std::filesystem::rename(tmp, path);
  } catch (const std::filesystem::filesystem_error& e) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move episode into place: " + std::string(e.what()));
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

Episode read_episode(const std::filesystem::path& path) {
  Handle file = OpenForRead(path);
  const hid_t f = file.get();
  Episode ep;

  if (!LinkExists(f, kImages)) throw SchemaError(kImages, "required group is missing");
  {
    Handle images = Checked(H5Gopen2(f, kImages, H5P_DEFAULT), H5Gclose, "open images");
    for (const auto& name : ChildNames(images.get())) {
      ep.cameras.push_back(ReadCamera(f, name));
    }
  }
  if (ep.cameras.empty()) throw SchemaError(kImages, "no camera dataset");

  ep.qpos = ReadMatrix(f, kQpos);
  {
    Handle qpos = Checked(H5Dopen2(f, kQpos, H5P_DEFAULT), H5Dclose, "open qpos");
    if (auto rep = ReadStringAttribute(qpos.get(), kRepresentationAttr)) {
      try {
        ep.representation = representation_from_string(*rep);
      } catch (const ConfigError& e) {
        throw SchemaError(std::string(kQpos) + "@" + kRepresentationAttr, e.what());
      }
    }
    if (auto init = ReadNumericAttribute<double>(qpos.get(), kInitialPoseAttr,
                                                 H5T_NATIVE_DOUBLE)) {
      if (init->size() != 7) {
        throw SchemaError(std::string(kQpos) + "@" + kInitialPoseAttr,
                          "expected 7 values");
      }
      ep.initial_pose = Pose::from_row(std::span<const double, 7>(init->data(), 7));
    }
  }
  ep.action = ReadMatrix(f, kAction);

  if (LinkExists(f, kGripperWidth)) {
    Handle ds = OpenDataset(f, kGripperWidth);
    const auto dims = Dims(ds.get());
    if (!(dims.size() == 1 || (dims.size() == 2 && dims[1] == 1))) {
      throw SchemaError(kGripperWidth, "expected shape (T, 1)");
    }
    ep.gripper_width = ReadDoubles(ds.get(), kGripperWidth);
  }
  if (LinkExists(f, kTimestamps)) {
    Handle ds = OpenDataset(f, kTimestamps);
    if (Dims(ds.get()).size() != 1) throw SchemaError(kTimestamps, "expected shape (T,)");
    ep.timestamps = ReadDoubles(ds.get(), kTimestamps);
  }
  ep.sim = ReadSim(f);

  for (const auto& entry : VisitAll(f)) {
    if (entry.kind != H5I_DATASET || IsKnownPath(entry.path)) continue;
    bool preserved = false;
    ExtraDataset extra = ReadExtra(f, entry.path, &preserved);
    if (preserved) ep.extras.push_back(std::move(extra));
  }
  return ep;
}

std::vector<std::string> list_hierarchy(const std::filesystem::path& path) {
  Handle file = OpenForRead(path);
  std::vector<std::string> out;
  for (const auto& entry : VisitAll(file.get())) {
    const char* kind = entry.kind == H5I_GROUP     ? "Group"
                       : entry.kind == H5I_DATASET ? "Dataset"
                                                   : "Other";
    out.push_back(entry.path + " (" + kind + ")");
  }
  hsize_t idx = 0;
  Check(H5Aiterate2(file.get(), H5_INDEX_NAME, H5_ITER_INC, &idx, CollectAttr, &out),
        "attribute iteration");
  std::sort(out.begin(), out.end());
  return out;
}

ValidationReport validate_episode(const Episode& ep) {
  ValidationReport report;
  auto add = [&](std::string check, std::string message,
                 std::optional<std::size_t> row = std::nullopt) {
    report.findings.push_back({std::move(check), std::move(message), row});
  };

  const std::size_t t = ep.length();
  if (t == 0) add("shape", "qpos has no rows");
  if (static_cast<std::size_t>(ep.qpos.cols()) != kRowWidth) {
    add("columns", "qpos has " + std::to_string(ep.qpos.cols()) + " columns, expected 7");
  }
  if (static_cast<std::size_t>(ep.action.cols()) != kRowWidth) {
    add("columns", "action has " + std::to_string(ep.action.cols()) + " columns, expected 7");
  }
  if (static_cast<std::size_t>(ep.action.rows()) != t) {
    add("shape", "action has " + std::to_string(ep.action.rows()) + " rows, qpos has " +
                     std::to_string(t));
  }
  if (ep.cameras.empty()) add("images", "no camera dataset");
  for (const auto& cam : ep.cameras) {
    if (cam.frames() != t) {
      add("shape", "images/" + cam.name + " has " + std::to_string(cam.frames()) +
                       " frames, qpos has " + std::to_string(t));
    }
    if (const auto* stack = std::get_if<ImageStack>(&cam.data)) {
      if (stack->pixels.size() != stack->frames * stack->height * stack->width * 3) {
        add("images", "images/" + cam.name + " pixel buffer does not match its shape");
      }
    }
  }
  if (ep.gripper_width && ep.gripper_width->size() != t) {
    add("shape", "gripper_width has " + std::to_string(ep.gripper_width->size()) +
                     " rows, qpos has " + std::to_string(t));
  }
  if (ep.timestamps) {
    if (ep.timestamps->size() != t) {
      add("shape", "timestamps has " + std::to_string(ep.timestamps->size()) +
                       " rows, qpos has " + std::to_string(t));
    }
    for (std::size_t i = 1; i < ep.timestamps->size(); ++i) {
      if (!((*ep.timestamps)[i] > (*ep.timestamps)[i - 1])) {
        add("timestamps", "timestamps not strictly increasing", i);
        break;
      }
    }
  }
  if (!ep.sim) add("sim", "root attribute 'sim' is missing");

  auto check_rows = [&](const RowMatrix& m, const char* name) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto row = static_cast<std::size_t>(i);
      if (!m.row(i).allFinite()) {
        add("finite", std::string(name) + " row has non-finite values", row);
        continue;
      }
      if (ep.representation == Representation::Joint || m.cols() != 7) continue;
      const double norm = m.row(i).tail<4>().norm();
      if (std::abs(norm - 1.0) > kQuaternionNormTolerance) {
        std::ostringstream msg;
        msg << name << " quaternion norm " << norm << " differs from 1 by more than "
            << kQuaternionNormTolerance;
        add("quaternion_norm", msg.str(), row);
      }
    }
  };
  check_rows(ep.qpos, "qpos");
  check_rows(ep.action, "action");
  if (ep.qpos.rows() == ep.action.rows() && ep.qpos.cols() == ep.action.cols() &&
      ep.qpos != ep.action) {
    add("mirror", "action does not mirror qpos");
  }
  if (ep.representation == Representation::TcpRelative && !ep.initial_pose) {
    add("representation", "tcp_relative episode lacks initial_pose");
  }
  return report;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["ok"] = report.ok();
  j["findings"] = nlohmann::json::array();
  for (const auto& f : report.findings) {
    nlohmann::json item = {{"check", f.check}, {"message", f.message}};
    if (f.row) item["row"] = *f.row;
    j["findings"].push_back(std::move(item));
  }
  return j;
}

nlohmann::json to_json(const EpisodeManifest& m) {
  return {{"task", m.task},
          {"episode_index", m.episode_index},
          {"sources", m.sources},
          {"config_digest", m.config_digest},
          {"representation", std::string(to_string(m.representation))}};
}

EpisodeManifest manifest_from_json(const nlohmann::json& j) {
  EpisodeManifest m;
  try {
    m.task = j.at("task").get<std::string>();
    m.episode_index = j.at("episode_index").get<std::int64_t>();
    m.sources = j.value("sources", std::vector<std::string>{});
    m.config_digest = j.value("config_digest", std::string{});
    m.representation =
        representation_from_string(j.value("representation", std::string("tcp_absolute")));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (m.episode_index < 0) throw ConfigError("manifest: episode_index must be >= 0");
  return m;
}

void write_manifest(const std::filesystem::path& path, const EpisodeManifest& m) {
  if (m.episode_index < 0) throw ConfigError("manifest: episode_index must be >= 0");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(m).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

EpisodeManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

EpisodeBatchWriter::EpisodeBatchWriter(std::filesystem::path root, std::string task,
                                       std::size_t per_directory)
    : root_(std::move(root)), task_(std::move(task)), per_directory_(per_directory) {
  if (task_.empty() || task_.find('/') != std::string::npos) {
    throw ConfigError("task name must be non-empty and contain no '/'");
  }
  if (per_directory_ == 0 || per_directory_ > kMaxEpisodesPerDirectory) {
    throw ConfigError("episodes per directory must be in [1, " +
                      std::to_string(kMaxEpisodesPerDirectory) + "]");
  }
}

std::filesystem::path EpisodeBatchWriter::path_for(std::int64_t episode_index) const {
  if (episode_index < 0) throw ConfigError("episode index must be >= 0");
  const auto part = static_cast<std::size_t>(episode_index) / per_directory_;
  char dir[32];
  std::snprintf(dir, sizeof dir, "_part%03zu", part);
  return root_ / (task_ + dir) /
         ("episode_" + std::to_string(episode_index) + ".hdf5");
}

std::filesystem::path EpisodeBatchWriter::write(const Episode& ep,
                                                EpisodeManifest manifest) {
  manifest.task = task_;
  manifest.representation = ep.representation;
  const auto path = path_for(manifest.episode_index);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  write_episode(path, ep);
  auto manifest_path = path;
  manifest_path.replace_extension(".json");
  write_manifest(manifest_path, manifest);
  return path;
}

}  // namespace demotraj
