import logging
import re
import tomllib
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import sympy as sp
from pydantic import TypeAdapter, ValidationError
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

from app.models.schemas import (
    CertificateFile,
    DivisorialCertFile,
    ExternalFamily,
    ExternalFile,
    FlagCertFile,
    GeometryFile,
    ScopeFile,
    SurfaceFile,
    UpperBoundCertFile,
)
from app.services.certify import (
    PRINTED_KEYS,
    Certificate,
    DivisorialCertificate,
    FlagCertificate,
    FlagUChamber,
    NegativeTerm,
    UChamber,
    UpperBoundCertificate,
    VChamber,
)
from app.services.errors import (
    CertifyError,
    CorpusParseError,
    DanglingReferenceError,
    SelfCheckError,
)
from app.services.exact import U, V, AffineUV, format_rational, to_rational, uni
from app.services.lattice import (
    DivisorClass,
    PolyClass,
    RestrictionMap,
    SurfaceCurve,
    SurfaceGeometry,
    ThreefoldCurve,
    ThreefoldGeometry,
    blowup_along_curve,
    blowup_at_point,
    parse_class,
    unit_class,
    zero_class,
)

logger = logging.getLogger(__name__)

EXTERNAL_FILE = "external.toml"
SCOPE_FILE = "scope.toml"

_certificate_adapter = TypeAdapter(CertificateFile)


@dataclass
class Corpus:
    """Everything loaded from one corpus root, in deterministic order"""
    root: Path
    geometries: dict[str, ThreefoldGeometry] = field(default_factory=dict)  # "family/name"
    surfaces: dict[str, SurfaceGeometry] = field(default_factory=dict)
    certificates: list[Certificate] = field(default_factory=list)
    scopes: dict[str, ScopeFile] = field(default_factory=dict)
    externals: list[ExternalFamily] = field(default_factory=list)

    @property
    def families(self) -> list[str]:
        return sorted(self.scopes)

    def certificate(self, family: str, name: str) -> Certificate:
        for cert in self.certificates:
            if cert.family == family and cert.name == name:
                return cert
        raise DanglingReferenceError(f"{family}: no certificate named {name}")

    def certificates_of(self, family: str) -> list[Certificate]:
        return [cert for cert in self.certificates if cert.family == family]

    def flags(self) -> list[FlagCertificate]:
        return [cert for cert in self.certificates if isinstance(cert, FlagCertificate)]


def _line_of(text: str, needle: str) -> Optional[int]:
    """1-based line of the first `needle = ...` assignment, or of any occurrence."""
    pattern = re.compile(rf"^\s*\"?{re.escape(needle)}\"?\s*=", re.MULTILINE)
    match = pattern.search(text)
    if match is None:
        position = text.find(needle)
        if position < 0:
            return None
        return text.count("\n", 0, position) + 1
    return text.count("\n", 0, match.start()) + 1


def scalar(text, variables=(U,)) -> sp.Expr:
    """Parse an exact scalar expression in the given variables."""
    local_dict = {"u": U, "v": V}
    try:
        expr = parse_expr(str(text), local_dict=local_dict, transformations=standard_transformations)
    except Exception as e:
        raise ValueError(f"cannot parse {text!r}: {e}") from e
    expr = sp.sympify(expr)
    if expr.atoms(sp.Float):
        raise ValueError(f"{text!r} is not exact; write fractions as p/q")
    extra = expr.free_symbols - set(variables)
    if extra:
        raise ValueError(f"{text!r} depends on {sorted(map(str, extra))}")
    return sp.expand(expr)


class _FileContext:
    """Wraps model building so every error names the file and, if possible, the line"""

    def __init__(self, path: Path):
        self.path = path
        self.text = path.read_text(encoding="utf-8")

    def load(self) -> dict:
        try:
            return tomllib.loads(self.text)
        except tomllib.TOMLDecodeError as e:
            match = re.search(r"line (\d+)", str(e))
            line = getattr(e, "lineno", None) or (int(match.group(1)) if match else None)
            raise CorpusParseError(self.path, line, f"invalid TOML: {e}") from e

    def validate(self, adapter, data: dict):
        try:
            return adapter(data)
        except ValidationError as e:
            error = e.errors()[0]
            keys = [str(part) for part in error["loc"] if isinstance(part, str)]
            line = _line_of(self.text, keys[-1]) if keys else None
            where = ".".join(str(part) for part in error["loc"])
            raise CorpusParseError(self.path, line, f"{where}: {error['msg']}") from e

    def fail(self, message: str, needle: Optional[str] = None) -> CorpusParseError:
        line = _line_of(self.text, needle) if needle else None
        return CorpusParseError(self.path, line, message)

    def rational(self, value, needle: Optional[str] = None):
        try:
            return to_rational(value)
        except CertifyError as e:
            raise self.fail(str(e), needle or str(value)) from e

    def expr(self, text, variables=(U,), needle: Optional[str] = None) -> sp.Expr:
        try:
            return scalar(text, variables)
        except ValueError as e:
            raise self.fail(str(e), needle or str(text)) from e

    def affine(self, text, variables=(U,)) -> AffineUV:
        try:
            return AffineUV.from_expr(scalar(text, variables))
        except (ValueError, CertifyError) as e:
            raise self.fail(str(e), str(text)) from e

    def cls(self, parse, text: str, variables=(U,)) -> PolyClass:
        try:
            result = parse(text)
        except CertifyError as e:
            raise self.fail(str(e), text) from e
        extra = set().union(*(sp.sympify(c).free_symbols for c in result.coords)) - set(variables)
        if extra:
            raise self.fail(f"class {text!r} may not depend on {sorted(map(str, extra))}", text)
        return result

    def constant_cls(self, parse, text: str) -> DivisorClass:
        result = self.cls(parse, text, variables=())
        if not isinstance(result, DivisorClass):
            raise self.fail(f"class {text!r} must be constant", text)
        return result


class CorpusLoader:
    def __init__(self):
        self._geometry_files: dict[str, tuple[_FileContext, GeometryFile]] = {}
        self._resolving: set[str] = set()
        self._built: dict[str, ThreefoldGeometry] = {}

    def load(self, root) -> Corpus:
        """
        Load and cross-check a corpus directory.

        Args:
            root: directory holding one sub-directory per family and an
                optional external.toml

        Returns:
            Corpus with geometries, surfaces, certificates and scopes

        Raises:
            CorpusParseError: a file does not parse or violates its schema
            DanglingReferenceError: a reference does not resolve
            SelfCheckError: a geometry fails its self-checks
            FileNotFoundError: root does not exist
        """
        root = Path(root)
        if not root.is_dir():
            raise FileNotFoundError(f"corpus root not found: {root}")

        corpus = Corpus(root=root)
        external = root / EXTERNAL_FILE
        if external.is_file():
            ctx = _FileContext(external)
            corpus.externals = ctx.validate(ExternalFile.model_validate, ctx.load()).families

        for family_dir in sorted(p for p in root.iterdir() if p.is_dir()):
            self._load_family(corpus, family_dir)

        logger.info(
            f"Loaded corpus {root}: {len(corpus.scopes)} scopes, {len(corpus.geometries)} geometries, "
            f"{len(corpus.surfaces)} surfaces, {len(corpus.certificates)} certificates"
        )
        return corpus

    def _load_family(self, corpus: Corpus, family_dir: Path) -> None:
        family = family_dir.name
        self._geometry_files = {}
        self._resolving = set()
        self._built = {}

        # 1. 三维几何
        for path in sorted((family_dir / "geometry").glob("*.toml")):
            ctx = _FileContext(path)
            spec = ctx.validate(GeometryFile.model_validate, ctx.load())
            if spec.name in self._geometry_files:
                raise ctx.fail(f"duplicate geometry name {spec.name}", "name")
            self._geometry_files[spec.name] = (ctx, spec)
        geometries = {name: self._geometry(family, name) for name in sorted(self._geometry_files)}
        for name, g in geometries.items():
            corpus.geometries[f"{family}/{name}"] = g

        # 2. 曲面
        surfaces: dict[str, SurfaceGeometry] = {}
        for path in sorted((family_dir / "surfaces").glob("*.toml")):
            ctx = _FileContext(path)
            spec = ctx.validate(SurfaceFile.model_validate, ctx.load())
            if spec.name in surfaces:
                raise ctx.fail(f"duplicate surface name {spec.name}", "name")
            surfaces[spec.name] = self._surface(ctx, spec, family, geometries)
            corpus.surfaces[f"{family}/{spec.name}"] = surfaces[spec.name]

        # 3. 证书: 先 divisorial, flag 依赖它们
        specs = []
        for path in sorted((family_dir / "certs").glob("*.toml")):
            ctx = _FileContext(path)
            specs.append((ctx, ctx.validate(_certificate_adapter.validate_python, ctx.load())))
        names = [spec.name for _, spec in specs]
        for ctx, spec in specs:
            if names.count(spec.name) > 1:
                raise ctx.fail(f"duplicate certificate name {spec.name}", "name")
            unknown = set(spec.printed) - set(PRINTED_KEYS[spec.kind])
            if unknown:
                raise ctx.fail(f"unknown printed keys {sorted(unknown)} for a {spec.kind} certificate", "printed")

        divisorials: dict[str, DivisorialCertificate] = {}
        built: dict[str, Certificate] = {}
        for ctx, spec in specs:
            if isinstance(spec, DivisorialCertFile):
                divisorials[spec.name] = built[spec.name] = self._divisorial(ctx, spec, family, geometries)
            elif isinstance(spec, UpperBoundCertFile):
                built[spec.name] = self._upper_bound(ctx, spec, family, geometries)
        for ctx, spec in specs:
            if isinstance(spec, FlagCertFile):
                built[spec.name] = self._flag(ctx, spec, family, surfaces, divisorials)
        corpus.certificates.extend(built[spec.name] for _, spec in specs)

        # 4. scope
        scope_path = family_dir / SCOPE_FILE
        if scope_path.is_file():
            ctx = _FileContext(scope_path)
            scope = ctx.validate(ScopeFile.model_validate, ctx.load())
            self._check_scope(ctx, scope, family, built, geometries)
            corpus.scopes[family] = scope
        elif built or geometries:
            logger.warning(f"Family {family} has no {SCOPE_FILE}")

    # ------------------------------------------------------------------
    # Geometries
    # ------------------------------------------------------------------

    def _geometry(self, family: str, name: str) -> ThreefoldGeometry:
        if name in self._built:
            return self._built[name]
        ctx, spec = self._geometry_files[name]
        if name in self._resolving:
            raise ctx.fail(f"geometry {name} is its own base", "base")
        self._resolving.add(name)
        try:
            g = self._build_geometry(ctx, spec, family)
        finally:
            self._resolving.discard(name)
        self._built[name] = g
        return g

    def _build_geometry(self, ctx: _FileContext, spec: GeometryFile, family: str) -> ThreefoldGeometry:
        if spec.base is not None:
            if spec.base not in self._geometry_files:
                raise DanglingReferenceError(f"{ctx.path}: geometry {spec.name} has unknown base {spec.base}")
            g = replace(self._geometry(family, spec.base))
        else:
            basis = tuple(spec.basis)
            if len(set(basis)) != len(basis) or set(basis) & {"u", "v"}:
                raise ctx.fail("basis names must be distinct and may not be u or v", "basis")
            triples = {}
            for a, b, c, value in spec.triples:
                for letter in (a, b, c):
                    if letter not in basis:
                        raise ctx.fail(f"triple entry names unknown divisor {letter}", "triples")
                key = tuple(sorted(basis.index(x) for x in (a, b, c)))
                if key in triples and triples[key] != ctx.rational(value):
                    raise ctx.fail(f"conflicting entries for {a}.{b}.{c}", "triples")
                triples[key] = ctx.rational(value)
            anticanonical = ctx.constant_cls(lambda t: parse_class(t, basis), spec.anticanonical)
            try:
                g = ThreefoldGeometry(name=spec.name, basis=basis, triples=triples, anticanonical=anticanonical)
            except CertifyError as e:
                raise ctx.fail(str(e)) from e

        for step in spec.blowups:
            try:
                if step.kind == "point":
                    g = blowup_at_point(g, step.name)
                else:
                    degrees = {key: ctx.rational(value) for key, value in step.degrees.items()}
                    canonical = ctx.rational(step.canonical_dot) if step.canonical_dot is not None else None
                    g = blowup_along_curve(g, step.name, step.genus, degrees, canonical)
            except CertifyError as e:
                raise ctx.fail(str(e), step.name) from e

        g.name = spec.name
        g.family = family
        g.description = spec.description
        g.test_curves = {}
        g.divisors = {}

        # 自检: 反典范类的立方
        expected = ctx.rational(spec.anticanonical_cube, "anticanonical_cube")
        g.anticanonical_cube_expected = expected
        cube = g.anticanonical_cube()
        if cube != expected:
            raise SelfCheckError(
                f"{ctx.path}: geometry {spec.name}: anticanonical cube is {format_rational(cube)}, "
                f"expected {format_rational(expected)}"
            )
        for a, b, c, value in spec.printed:
            try:
                indices = [g.index(x) for x in (a, b, c)]
            except CertifyError as e:
                raise ctx.fail(str(e), "printed") from e
            computed = g.triple(*indices)
            if computed != ctx.rational(value):
                raise SelfCheckError(
                    f"{ctx.path}: geometry {spec.name}: {a}.{b}.{c} is {format_rational(computed)}, "
                    f"printed {value}"
                )

        for divisor in spec.divisors:
            if divisor.name in g.basis or divisor.name in g.divisors:
                raise ctx.fail(f"divisor name {divisor.name} is already used", divisor.name)
            g.divisors[divisor.name] = ctx.constant_cls(g.class_of, divisor.class_)
        for curve in spec.curves:
            functional = [sp.Integer(0)] * g.rank
            for key, value in curve.dot.items():
                if key not in g.basis:
                    raise ctx.fail(f"curve {curve.name} pairs with unknown divisor {key}", curve.name)
                functional[g.index(key)] = ctx.rational(value)
            if curve.name in g.test_curves:
                raise ctx.fail(f"duplicate curve name {curve.name}", curve.name)
            g.test_curves[curve.name] = ThreefoldCurve(curve.name, tuple(functional), curve.model)

        logger.debug(f"Geometry {family}/{spec.name}: rank {g.rank}, (-K)^3 = {format_rational(cube)}")
        return g

    # ------------------------------------------------------------------
    # Surfaces
    # ------------------------------------------------------------------

    def _surface(self, ctx: _FileContext, spec: SurfaceFile, family: str, geometries) -> SurfaceGeometry:
        basis = tuple(spec.basis)
        if len(set(basis)) != len(basis) or set(basis) & {"u", "v"}:
            raise ctx.fail("basis names must be distinct and may not be u or v", "basis")
        n = len(basis)
        gram = sp.zeros(n, n)
        seen = set()
        for a, b, value in spec.gram:
            if a not in basis or b not in basis:
                raise ctx.fail(f"gram entry names unknown class {a if a not in basis else b}", "gram")
            i, j = basis.index(a), basis.index(b)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ctx.fail(f"duplicate gram entry {a}.{b}", "gram")
            seen.add(key)
            gram[i, j] = gram[j, i] = ctx.rational(value)

        curves: dict[str, SurfaceCurve] = {}
        for curve in spec.curves:
            if curve.name in curves:
                raise ctx.fail(f"duplicate curve name {curve.name}", curve.name)
            named = {name: c.cls for name, c in curves.items()}
            cls = ctx.constant_cls(lambda t: parse_class(t, basis, named), curve.class_)
            if curve.name in basis and not cls.same_as(unit_class(n, basis.index(curve.name))):
                raise ctx.fail(f"curve {curve.name} shares a basis name but not its class", curve.name)
            curves[curve.name] = SurfaceCurve(curve.name, cls, curve.cone)

        try:
            surface = SurfaceGeometry(
                name=spec.name,
                basis=basis,
                gram=gram,
                curves=curves,
                cone_complete=spec.cone_complete,
                family=family,
                description=spec.description,
            )
        except CertifyError as e:
            raise ctx.fail(str(e)) from e

        embedding = spec.embedding
        if embedding.geometry not in geometries:
            raise DanglingReferenceError(f"{ctx.path}: surface {spec.name} embeds in unknown geometry {embedding.geometry}")
        g = geometries[embedding.geometry]
        divisor = ctx.constant_cls(g.class_of, embedding.divisor)
        unknown = set(embedding.map) - set(g.basis)
        if unknown:
            raise DanglingReferenceError(f"{ctx.path}: restriction map names unknown divisors {sorted(unknown)}")
        images = tuple(
            ctx.constant_cls(surface.class_of, embedding.map[b]) if b in embedding.map else zero_class(n)
            for b in g.basis
        )
        surface.restriction = RestrictionMap(embedding.geometry, divisor, images)
        logger.debug(f"Surface {family}/{spec.name}: rank {n}, {len(surface.cone_curves())} cone curves")
        return surface

    # ------------------------------------------------------------------
    # Certificates
    # ------------------------------------------------------------------

    @staticmethod
    def _lookup_geometry(ctx, spec, geometries) -> ThreefoldGeometry:
        if spec.geometry not in geometries:
            raise DanglingReferenceError(f"{ctx.path}: certificate {spec.name} names unknown geometry {spec.geometry}")
        return geometries[spec.geometry]

    @staticmethod
    def _polarization(ctx, spec, g: ThreefoldGeometry) -> DivisorClass:
        if spec.polarization is None:
            return g.anticanonical
        return ctx.constant_cls(g.class_of, spec.polarization)

    @staticmethod
    def _divisor(ctx, spec, g: ThreefoldGeometry) -> DivisorClass:
        if not _names_resolve(spec.divisor, g):
            raise DanglingReferenceError(f"{ctx.path}: certificate {spec.name} names unknown divisor {spec.divisor}")
        return ctx.constant_cls(g.class_of, spec.divisor)

    def _divisorial(self, ctx, spec: DivisorialCertFile, family, geometries) -> DivisorialCertificate:
        g = self._lookup_geometry(ctx, spec, geometries)
        chambers = []
        for chamber in spec.chambers:
            negative = []
            for name, coefficient in chamber.negative.items():
                if not _names_resolve(name, g):
                    raise DanglingReferenceError(f"{ctx.path}: negative part names unknown divisor {name}")
                negative.append(NegativeTerm(name, ctx.constant_cls(g.class_of, name), ctx.expr(coefficient)))
            flops = []
            for name in chamber.flops:
                if name not in g.test_curves:
                    raise DanglingReferenceError(f"{ctx.path}: flop of unknown curve {name}")
                flops.append(g.test_curves[name])
            chambers.append(UChamber(
                u_lo=ctx.rational(chamber.u[0]),
                u_hi=ctx.rational(chamber.u[1]),
                positive=ctx.cls(g.class_of, chamber.positive),
                negative=tuple(negative),
                flops=tuple(flops),
                volume=uni(ctx.expr(chamber.volume)) if chamber.volume is not None else None,
            ))
        return DivisorialCertificate(
            name=spec.name,
            family=family,
            geometry=g,
            divisor_name=spec.divisor,
            divisor=self._divisor(ctx, spec, g),
            polarization=self._polarization(ctx, spec, g),
            log_discrepancy=ctx.rational(spec.log_discrepancy, "log_discrepancy"),
            tau=ctx.rational(spec.tau, "tau"),
            chambers=chambers,
            expected_S=ctx.rational(spec.expected_S, "expected_S"),
            expected_beta=ctx.rational(spec.expected_beta, "expected_beta"),
            printed={key: ctx.rational(value) for key, value in spec.printed.items()},
            note=spec.note,
        )

    def _upper_bound(self, ctx, spec: UpperBoundCertFile, family, geometries) -> UpperBoundCertificate:
        g = self._lookup_geometry(ctx, spec, geometries)
        return UpperBoundCertificate(
            name=spec.name,
            family=family,
            geometry=g,
            divisor_name=spec.divisor,
            divisor=self._divisor(ctx, spec, g),
            polarization=self._polarization(ctx, spec, g),
            log_discrepancy=ctx.rational(spec.log_discrepancy, "log_discrepancy"),
            nef_end=ctx.rational(spec.nef_end, "nef_end"),
            tau_bound=ctx.rational(spec.tau_bound, "tau_bound"),
            expected_S_bound=ctx.rational(spec.expected_S_bound, "expected_S_bound"),
            expected_beta_bound=ctx.rational(spec.expected_beta_bound, "expected_beta_bound"),
            claimed_beta=ctx.rational(spec.claimed_beta, "claimed_beta") if spec.claimed_beta is not None else None,
            volume=uni(ctx.expr(spec.volume)) if spec.volume is not None else None,
            printed={key: ctx.rational(value) for key, value in spec.printed.items()},
            note=spec.note,
        )

    def _flag(self, ctx, spec: FlagCertFile, family, surfaces, divisorials) -> FlagCertificate:
        if spec.divisorial not in divisorials:
            raise DanglingReferenceError(f"{ctx.path}: flag {spec.name} names unknown divisorial certificate {spec.divisorial}")
        if spec.surface not in surfaces:
            raise DanglingReferenceError(f"{ctx.path}: flag {spec.name} names unknown surface {spec.surface}")
        s = surfaces[spec.surface]
        if spec.curve not in s.curves:
            raise DanglingReferenceError(f"{ctx.path}: flag {spec.name} names unknown curve {spec.curve} on {s.name}")
        support = {c.name for c in s.negative_curves()}

        chambers = []
        for chamber in spec.chambers:
            restricted_negative = []
            for name, coefficient in chamber.restricted_negative.items():
                if name not in s.curves:
                    raise DanglingReferenceError(f"{ctx.path}: restricted negative part names unknown curve {name}")
                restricted_negative.append((name, ctx.expr(coefficient)))
            v_chambers = []
            for vch in chamber.v_chambers:
                negative = []
                for name, coefficient in vch.negative.items():
                    if name not in s.curves:
                        raise DanglingReferenceError(f"{ctx.path}: negative part names unknown curve {name}")
                    if name not in support:
                        raise ctx.fail(f"{name} is not a negative cone curve of {s.name}", name)
                    negative.append((name, ctx.affine(coefficient, (U, V))))
                v_chambers.append(VChamber(
                    v_lo=ctx.affine(vch.v[0]),
                    v_hi=ctx.affine(vch.v[1]),
                    positive=ctx.cls(s.class_of, vch.positive, (U, V)),
                    negative=tuple(negative),
                    ord=ctx.affine(vch.ord, (U, V)),
                ))
            chambers.append(FlagUChamber(
                u_lo=ctx.rational(chamber.u[0]),
                u_hi=ctx.rational(chamber.u[1]),
                t=ctx.affine(chamber.t),
                v_chambers=tuple(v_chambers),
                restricted_negative=tuple(restricted_negative),
                restricted=ctx.cls(s.class_of, chamber.restricted) if chamber.restricted is not None else None,
                d=ctx.expr(chamber.d) if chamber.d is not None else None,
            ))

        optional = lambda value, key: ctx.rational(value, key) if value is not None else None  # noqa: E731
        return FlagCertificate(
            name=spec.name,
            family=family,
            divisorial=divisorials[spec.divisorial],
            surface=s,
            curve_name=spec.curve,
            chambers=chambers,
            expected_S_curve=ctx.rational(spec.expected_S_curve, "expected_S_curve"),
            expected_F_P=optional(spec.expected_F_P, "expected_F_P"),
            expected_S_point=optional(spec.expected_S_point, "expected_S_point"),
            printed={key: ctx.rational(value) for key, value in spec.printed.items()},
            note=spec.note,
        )

    # ------------------------------------------------------------------
    # Scopes
    # ------------------------------------------------------------------

    @staticmethod
    def _check_scope(ctx, scope: ScopeFile, family: str, certificates: dict, geometries) -> None:
        if scope.family != family:
            raise ctx.fail(f"scope names family {scope.family} inside directory {family}", "family")
        centers = [center.name for center in scope.centers]
        for center in scope.centers:
            if centers.count(center.name) > 1:
                raise ctx.fail(f"duplicate center {center.name}", center.name)
            if center.certificate is not None and center.certificate not in certificates:
                raise DanglingReferenceError(
                    f"{ctx.path}: center {center.name} names unknown certificate {center.certificate}"
                )
            if center.covered_by is not None and center.covered_by not in centers:
                raise DanglingReferenceError(f"{ctx.path}: center {center.name} is covered by unknown center {center.covered_by}")
        for eff in scope.eff:
            if eff.geometry not in geometries:
                raise DanglingReferenceError(f"{ctx.path}: eff check names unknown geometry {eff.geometry}")
            g = geometries[eff.geometry]
            for text in [eff.target] + eff.generators:
                ctx.constant_cls(g.class_of, text)
            if eff.expected and len(eff.expected) != len(eff.generators):
                raise ctx.fail("expected coefficients do not match the generators", "expected")


def _names_resolve(text: str, g: ThreefoldGeometry) -> bool:
    """A bare identifier must be a basis or named divisor; expressions are checked by the parser."""
    text = text.strip()
    if not text.isidentifier():
        return True
    return text in g.basis or text in g.divisors


# 创建全局加载器实例
corpus_loader = CorpusLoader()


def load_corpus(root) -> Corpus:
    return corpus_loader.load(root)
