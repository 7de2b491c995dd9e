// Copyright 2026 The EchoForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "echoforge/bvh.h"
#include "echoforge/obj_loader.h"
#include "echoforge/scene.h"
#include "echoforge/trajectory.h"
#include "test_util.h"

namespace echoforge {
namespace {

using nlohmann::json;
using testing::RandomUnit;

TEST(ObjTest, FanTriangulatesAndTracksGroups) {
  std::istringstream in(
      "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
      "g floor\nf 1 2 3 4\n"
      "o thing\nusemtl brick\nf 1/1/1 2//2 3\nf -1 -2 -3\n");
  const ObjMesh mesh = ParseObj(in);
  ASSERT_EQ(mesh.faces.size(), 4u);
  EXPECT_EQ(mesh.groups[mesh.faces[0].group], "floor");
  EXPECT_EQ(mesh.groups[mesh.faces[2].group], "brick");
  EXPECT_EQ(mesh.object_names[mesh.faces[2].group], "thing");
  // Negative indices are relative to the end of the vertex list.
  EXPECT_EQ(mesh.faces[3].a, 3);
  EXPECT_EQ(mesh.faces[3].c, 1);
}

TEST(ObjTest, RejectsMissingVertex) {
  std::istringstream in("v 0 0 0\nf 1 2 3\n");
  EXPECT_THROW(ParseObj(in), std::runtime_error);
}

TEST(BvhTest, CubeCenterHitsWallAtFiveMeters) {
  const auto tris = MakeBoxRoom(Vec3::Zero(), Vec3::Constant(10.0));
  const Bvh bvh(tris);
  const auto hit = bvh.Intersect(Vec3::Constant(5.0), Vec3::UnitX());
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->distance, 5.0, 1e-6);
  EXPECT_NEAR(std::abs(hit->normal.x()), 1.0, 1e-12);
  EXPECT_FALSE(bvh.Intersect(Vec3::Constant(5.0), Vec3::UnitX(), 4.0));
}

TEST(BvhTest, AgreesWithBruteForceOnTriangleSoup) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<Triangle> tris;
  for (int i = 0; i < 500; ++i) {
    const Vec3 c(u(gen), u(gen), u(gen));
    tris.push_back({c, c + 0.5 * RandomUnit(gen), c + 0.5 * RandomUnit(gen),
                    i % 3});
  }
  const Bvh bvh(tris);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 o(u(gen), u(gen), u(gen));
    const Vec3 d = RandomUnit(gen);
    const auto a = bvh.Intersect(o, d);
    const auto b = bvh.IntersectBruteForce(o, d);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (a) {
      EXPECT_NEAR(a->distance, b->distance, 1e-9);
      EXPECT_EQ(a->triangle, b->triangle);
      EXPECT_EQ(a->material, tris[a->triangle].material);
      EXPECT_TRUE(bvh.Occluded(o, d, a->distance + 1e-6));
    } else {
      EXPECT_FALSE(bvh.Occluded(o, d, 100.0));
    }
  }
}

json BoxSceneJson() {
  return json::parse(R"({
    "mesh": ")" ECHOFORGE_TEST_DATA R"(/shoebox.obj",
    "materials": [{"name": "wall", "absorption": [0.1, 0.2, 0.3, 0.4]}],
    "material_bindings": {"walls": "wall"},
    "sources": [{"id": "a", "position": [1, 2, 3], "gain": 2.0}],
    "listener": {"position": [5, 5, 5],
                 "orientation_quat": [0.70710678, 0, 0, 0.70710678]}
  })");
}

TEST(SceneTest, LoadsMeshMaterialsAndDefaults) {
  const SceneModel scene = LoadScene(BoxSceneJson(), ".");
  EXPECT_EQ(scene.triangles().size(), 12u);
  for (const Triangle& t : scene.triangles()) {
    EXPECT_EQ(scene.material(t.material).name, "wall");
  }
  EXPECT_DOUBLE_EQ(scene.material(0).absorption[3], 0.4);
  EXPECT_DOUBLE_EQ(scene.material(0).scattering[0], 0.5);
  EXPECT_EQ(scene.sources()[0].audio, "builtin:noise");
  EXPECT_DOUBLE_EQ(scene.sources()[0].gain, 2.0);
  EXPECT_DOUBLE_EQ(scene.speed_of_sound(), 343.0);
  // 90 degrees about z maps x to y.
  EXPECT_LT((scene.listener().orientation * Vec3::UnitX() - Vec3::UnitY())
                .norm(),
            1e-6);
  EXPECT_FALSE(scene.Occluded(Vec3(1, 1, 1), Vec3(9, 9, 9)));
  EXPECT_TRUE(scene.Occluded(Vec3(5, 5, 5), Vec3(15, 5, 5)));
}

TEST(SceneTest, UnboundGroupsGetDefaultMaterial) {
  json j = BoxSceneJson();
  j.erase("material_bindings");
  const SceneModel scene = LoadScene(j, ".");
  const Material& m = scene.material(scene.triangles()[0].material);
  EXPECT_DOUBLE_EQ(m.absorption[0], DefaultMaterial().absorption[0]);
}

TEST(SceneTest, RejectsInvalidDescriptions) {
  json j = BoxSceneJson();
  j["sources"] = json::array();
  EXPECT_THROW(LoadScene(j, "."), std::runtime_error);
  j = BoxSceneJson();
  j["materials"][0]["absorption"] = {0.1, 1.2, 0.1, 0.1};
  EXPECT_THROW(LoadScene(j, "."), std::runtime_error);
  j = BoxSceneJson();
  j["material_bindings"]["walls"] = "marble";
  EXPECT_THROW(LoadScene(j, "."), std::runtime_error);
  j = BoxSceneJson();
  j["mesh"] = "/nonexistent/room.obj";
  EXPECT_THROW(LoadScene(j, "."), std::runtime_error);
}

TEST(SceneTest, FreeFieldSceneHasNoGeometry) {
  json j = BoxSceneJson();
  j.erase("mesh");
  const SceneModel scene = LoadScene(j, ".");
  EXPECT_TRUE(scene.free_field());
  EXPECT_FALSE(scene.Occluded(Vec3::Zero(), Vec3(100, 0, 0)));
}

TEST(SceneTest, DropsDegenerateTriangles) {
  json j = BoxSceneJson();
  j["mesh"] = ECHOFORGE_TEST_DATA "/degenerate.obj";
  const SceneModel scene = LoadScene(j, ".");
  EXPECT_EQ(scene.triangles().size(), 1u);
  EXPECT_EQ(scene.dropped_degenerate(), 1);
}

TEST(SceneTest, BoxRoomFacesInward) {
  std::vector<Triangle> tris = MakeBoxRoom(Vec3::Zero(), Vec3::Ones());
  EXPECT_EQ(tris.size(), 12u);
  for (const Triangle& t : tris) {
    // Normals of the generated box face inward.
    const Vec3 n = (t.v1 - t.v0).cross(t.v2 - t.v0);
    const Vec3 c = (t.v0 + t.v1 + t.v2) / 3.0;
    EXPECT_GT(n.dot(Vec3::Constant(0.5) - c), 0.0);
  }
}

TEST(TrajectoryTest, InterpolatesPositionAndOrientation) {
  std::istringstream in(
      "# t x y z qw qx qy qz\n"
      "0, 0 0 0, 1 0 0 0\n"
      "2, 4 0 0, 0 0 0 1\n");
  const Trajectory tr = Trajectory::Parse(in);
  const Pose mid = tr.Sample(1.0);
  EXPECT_LT((mid.position - Vec3(2, 0, 0)).norm(), 1e-12);
  // Halfway between identity and 180 degrees about z is 90 degrees.
  EXPECT_LT((mid.orientation * Vec3::UnitX() - Vec3::UnitY()).norm(), 1e-12);
  EXPECT_LT((tr.Sample(-1.0).position).norm(), 1e-12);
  EXPECT_LT((tr.Sample(5.0).position - Vec3(4, 0, 0)).norm(), 1e-12);
}

TEST(TrajectoryTest, RejectsShortRows) {
  std::istringstream in("0 1 2 3\n");
  EXPECT_THROW(Trajectory::Parse(in), std::runtime_error);
}

}  // namespace
}  // namespace echoforge
