#include <string>

#include "doctest.h"
#include "libexpert/errors.hpp"
#include "libexpert/imports.hpp"
#include "libexpert/library_spec.hpp"
#include "libexpert/manifest.hpp"

using namespace libexpert;

namespace {
const LibrarySpec kReact = make_library_spec("react", "react");
}

TEST_CASE("library specs validate manifest name and patterns") {
  CHECK_NOTHROW(kReact.validate());
  LibrarySpec bad = kReact;
  bad.manifest_name = "";
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad.manifest_name = "re act";
  CHECK_THROWS_AS(bad.validate(), ContractError);
  bad = kReact;
  bad.import_patterns.clear();
  CHECK_THROWS_AS(bad.validate(), ContractError);
}

TEST_CASE("manifest kinds are recognized by file name") {
  CHECK(manifest_kind_for_path("package.json") == ManifestKind::npm_package);
  CHECK(manifest_kind_for_path("web/ui/package.json") == ManifestKind::npm_package);
  CHECK(manifest_kind_for_path("bower.json") == ManifestKind::bower);
  CHECK(!manifest_kind_for_path("requirements.txt").has_value());
  CHECK(!manifest_kind_for_path("index.js").has_value());
  CHECK(!manifest_kind_for_path("my-package.json").has_value());
  CHECK(require_manifest_kind("bower.json") == ManifestKind::bower);
  CHECK_THROWS_AS(require_manifest_kind("Gemfile"), Error);
}

TEST_CASE("parse_manifest finds the dependency key in either section") {
  const std::string runtime = R"({"name":"app","dependencies":{"react":"^16.0.0"}})";
  auto ev = parse_manifest(runtime, ManifestKind::npm_package, kReact);
  REQUIRE(ev.has_value());
  CHECK(ev->section == "dependencies");
  CHECK(ev->kind == ManifestKind::npm_package);

  const std::string dev = R"({"devDependencies":{"react":"*"}})";
  ev = parse_manifest(dev, ManifestKind::npm_package, kReact);
  REQUIRE(ev.has_value());
  CHECK(ev->section == "devDependencies");

  const std::string bower = R"({"dependencies":{"react":"16"}})";
  ev = parse_manifest(bower, ManifestKind::bower, kReact);
  REQUIRE(ev.has_value());
  CHECK(ev->kind == ManifestKind::bower);
}

TEST_CASE("parse_manifest requires key equality, not substrings") {
  CHECK(!parse_manifest(R"({"dependencies":{"react-dom":"^16.0.0"}})", ManifestKind::npm_package,
                        kReact)
           .has_value());
  CHECK(!parse_manifest(R"({"dependencies":{"preact":"*"}})", ManifestKind::npm_package, kReact)
           .has_value());
  // The name appearing outside a dependency section is not evidence.
  CHECK(!parse_manifest(R"({"name":"react","description":"uses react"})",
                        ManifestKind::npm_package, kReact)
           .has_value());
  CHECK(!parse_manifest(R"({"scripts":{"react":"echo"}})", ManifestKind::npm_package, kReact)
           .has_value());
  CHECK(!parse_manifest("{}", ManifestKind::npm_package, kReact).has_value());
}

TEST_CASE("parse_manifest raises on malformed JSON instead of answering no") {
  CHECK_THROWS_AS(parse_manifest("{\"dependencies\":", ManifestKind::npm_package, kReact),
                  ParseError);
  CHECK_THROWS_AS(parse_manifest("not json", ManifestKind::bower, kReact), ParseError);
}

TEST_CASE("module paths match exactly or with a subpath separator") {
  CHECK(module_path_matches("react", kReact));
  CHECK(module_path_matches("react/addons", kReact));
  CHECK(module_path_matches("react/lib/ReactDOM", kReact));
  CHECK(!module_path_matches("preact", kReact));
  CHECK(!module_path_matches("react-dom", kReact));
  CHECK(!module_path_matches("", kReact));

  LibrarySpec two = kReact;
  two.import_patterns = {"react", "react-dom"};
  CHECK(module_path_matches("react-dom", two));
  CHECK(module_path_matches("react-dom/server", two));
}

TEST_CASE("import lines are recognized in both statement families") {
  CHECK(line_imports_library("const React = require('react');", kReact));
  CHECK(line_imports_library("var r = require(\"react\")", kReact));
  CHECK(line_imports_library("import React from 'react';", kReact));
  CHECK(line_imports_library("import { Component } from \"react\";", kReact));
  CHECK(line_imports_library("import 'react';", kReact));
  CHECK(line_imports_library("import addons from 'react/addons';", kReact));
  CHECK(!line_imports_library("import p from 'preact';", kReact));
  CHECK(!line_imports_library("const dom = require('react-dom');", kReact));
  CHECK(!line_imports_library("let x = 5;", kReact));
  CHECK(!line_imports_library("// no import here", kReact));
  // Commented-out imports still count; the scan is lexical by design.
  CHECK(line_imports_library("// const React = require('react');", kReact));
}

TEST_CASE("detect_client_files fires on any importing line") {
  CHECK(detect_client_files("var a = 1;\nimport React from 'react';\nexport default a;\n",
                            kReact));
  CHECK(!detect_client_files("var a = 1;\nexport default a;\n", kReact));
  CHECK(!detect_client_files("", kReact));
}

TEST_CASE("binary detection looks for a NUL in the head of the file") {
  CHECK(looks_binary(std::string_view("ab\0cd", 5)));
  CHECK(!looks_binary("plain text\nwith lines\n"));
  std::string tail_nul(9000, 'x');
  tail_nul += '\0';
  CHECK(!looks_binary(tail_nul));
}

TEST_CASE("client files must have a source extension") {
  CHECK(is_source_path("src/app.js"));
  CHECK(is_source_path("a/b/c.jsx"));
  CHECK(is_source_path("mod.mjs"));
  CHECK(is_source_path("mod.cjs"));
  CHECK(is_source_path("types.ts"));
  CHECK(is_source_path("view.tsx"));
  CHECK(is_source_path("widget.vue"));
  CHECK(is_source_path("old.coffee"));
  CHECK(!is_source_path("README.md"));
  CHECK(!is_source_path("package.json"));
  CHECK(!is_source_path("photo.png"));
  CHECK(!is_source_path("Makefile"));
}
