use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SchemaConstruct {
    SequenceOrder,
    RequiredAttribute,
    Occurrence,
    SimpleTypeLexical,
    NamespaceQualified,
    UnknownContent,
    /// A constraint relating two values (thumbnail versus full size).
    CoConstraint,
}

/// Where a rule comes from relative to the published schema listing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RuleOrigin {
    /// Shown verbatim in the published excerpt.
    Excerpt,
    /// Same construct as the excerpt, applied to elements the excerpt elides.
    ExcerptDerived,
    /// Contract of the notebook tooling rather than of the schema.
    Toolkit,
}

impl fmt::Display for RuleOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleOrigin::Excerpt => "excerpt",
            RuleOrigin::ExcerptDerived => "excerpt-derived",
            RuleOrigin::Toolkit => "toolkit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub id: &'static str,
    pub description: &'static str,
    pub schema_construct: SchemaConstruct,
    pub origin: RuleOrigin,
    /// Schema construct the rule enforces, written as XSD.
    pub excerpt: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown rule {0:?}")]
pub struct UnknownRule(pub String);

pub(crate) const ROOT: &str = "SLN-ROOT-001";
pub(crate) const QUALIFIED: &str = "SLN-NS-001";
pub(crate) const SEQ_WEBSITE: &str = "SLN-SEQ-001";
pub(crate) const SEQ_CONTACT: &str = "SLN-SEQ-002";
pub(crate) const SEQ_DATASET: &str = "SLN-SEQ-003";
pub(crate) const SEQ_IMAGE: &str = "SLN-SEQ-004";
pub(crate) const SEQ_VIDEO: &str = "SLN-SEQ-005";
pub(crate) const MISSING_CHILD: &str = "SLN-OCC-001";
pub(crate) const TOO_MANY: &str = "SLN-OCC-002";
pub(crate) const REQUIRED_ATTR: &str = "SLN-ATT-001";
pub(crate) const NON_EMPTY: &str = "SLN-TYP-001";
pub(crate) const DATE: &str = "SLN-TYP-002";
pub(crate) const DIMENSION: &str = "SLN-TYP-003";
pub(crate) const BOOLEAN: &str = "SLN-TYP-004";
pub(crate) const DATA_URI: &str = "SLN-TYP-005";
pub(crate) const THUMB_FITS: &str = "SLN-DIM-001";
pub(crate) const UNKNOWN_ELEMENT: &str = "SLN-UNK-001";
pub(crate) const UNKNOWN_ATTR: &str = "SLN-UNK-002";
pub(crate) const STRAY_TEXT: &str = "SLN-UNK-003";

use RuleOrigin::{Excerpt, ExcerptDerived, Toolkit};
use SchemaConstruct::*;

static CATALOGUE: &[Rule] = &[
    Rule {
        id: ROOT,
        description: "The document element must be <sln> in the namespace http://umbra.nascom.nasa.gov/.",
        schema_construct: NamespaceQualified,
        origin: Excerpt,
        excerpt: r#"<xsd:schema targetNamespace="http://umbra.nascom.nasa.gov/">"#,
    },
    Rule {
        id: QUALIFIED,
        description: "Every notebook element must be qualified with the SLN namespace; unqualified or foreign-namespace copies of known elements are rejected.",
        schema_construct: NamespaceQualified,
        origin: Excerpt,
        excerpt: r#"<xsd:schema elementFormDefault="qualified">"#,
    },
    Rule {
        id: SEQ_WEBSITE,
        description: "Children of <website> must follow the fixed order purpose, date, related, contacts, datasets, images, videos, todos, othernotes.",
        schema_construct: SequenceOrder,
        origin: ExcerptDerived,
        excerpt: "<xsd:sequence> purpose date related? contacts? datasets? images? videos? todos? othernotes? </xsd:sequence>",
    },
    Rule {
        id: SEQ_CONTACT,
        description: "Children of <contact> must follow the fixed order email, webpage, notes.",
        schema_construct: SequenceOrder,
        origin: Excerpt,
        excerpt: r#"<xsd:sequence><xsd:element name="email"/><xsd:element name="webpage"/><xsd:element name="notes"/></xsd:sequence>"#,
    },
    Rule {
        id: SEQ_DATASET,
        description: "Children of <dataset> must follow the fixed order notes, content.",
        schema_construct: SequenceOrder,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:sequence><xsd:element name="notes"/><xsd:element name="content"/></xsd:sequence>"#,
    },
    Rule {
        id: SEQ_IMAGE,
        description: "Children of <image> must follow the fixed order notes, full, thumbnail.",
        schema_construct: SequenceOrder,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:sequence><xsd:element name="notes"/><xsd:element name="full"/><xsd:element name="thumbnail"/></xsd:sequence>"#,
    },
    Rule {
        id: SEQ_VIDEO,
        description: "Children of <video> must follow the fixed order notes, data.",
        schema_construct: SequenceOrder,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:sequence><xsd:element name="notes"/><xsd:element name="data" minOccurs="0"/></xsd:sequence>"#,
    },
    Rule {
        id: MISSING_CHILD,
        description: "A required child element is absent. Group elements such as <contacts> must hold at least one item.",
        schema_construct: Occurrence,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:element name="contact" maxOccurs="unbounded"/> (minOccurs defaults to 1)"#,
    },
    Rule {
        id: TOO_MANY,
        description: "A child element occurs more often than its maxOccurs allows.",
        schema_construct: Occurrence,
        origin: Excerpt,
        excerpt: r#"<xsd:element name="email" type="xsd:string"/> (maxOccurs defaults to 1)"#,
    },
    Rule {
        id: REQUIRED_ATTR,
        description: "An attribute declared use=\"required\" is missing.",
        schema_construct: RequiredAttribute,
        origin: Excerpt,
        excerpt: r#"<xsd:attribute use="required" name="surname" type="attribStringType"/>"#,
    },
    Rule {
        id: NON_EMPTY,
        description: "Names, surnames and related-link values (attribStringType) and todo text must not be empty.",
        schema_construct: SimpleTypeLexical,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:simpleType name="attribStringType"><xsd:restriction base="xsd:string"><xsd:minLength value="1"/></xsd:restriction></xsd:simpleType>"#,
    },
    Rule {
        id: DATE,
        description: "Dates are written YYYY-MM-DD and name a real calendar day.",
        schema_construct: SimpleTypeLexical,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:element name="date" type="xsd:date"/>"#,
    },
    Rule {
        id: DIMENSION,
        description: "Image width and height are integers from 1 to 2048.",
        schema_construct: SimpleTypeLexical,
        origin: Toolkit,
        excerpt: r#"<xsd:restriction base="xsd:positiveInteger"><xsd:maxInclusive value="2048"/></xsd:restriction>"#,
    },
    Rule {
        id: BOOLEAN,
        description: "The todo done flag is one of true, false, 1, 0.",
        schema_construct: SimpleTypeLexical,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:attribute name="done" type="xsd:boolean"/>"#,
    },
    Rule {
        id: DATA_URI,
        description: "Embedded media is a data URI of the form data:<type>;base64,<padded standard base64>.",
        schema_construct: SimpleTypeLexical,
        origin: Toolkit,
        excerpt: r#"<xsd:element name="data" type="xsd:string"/> holding an RFC 2397 URI"#,
    },
    Rule {
        id: THUMB_FITS,
        description: "A thumbnail may not be wider or taller than its full image.",
        schema_construct: CoConstraint,
        origin: Toolkit,
        excerpt: "thumbnail/@width <= full/@width and thumbnail/@height <= full/@height",
    },
    Rule {
        id: UNKNOWN_ELEMENT,
        description: "An element that the schema does not declare at this position.",
        schema_construct: UnknownContent,
        origin: ExcerptDerived,
        excerpt: "<xsd:sequence> without <xsd:any>",
    },
    Rule {
        id: UNKNOWN_ATTR,
        description: "An attribute that the schema does not declare on this element.",
        schema_construct: UnknownContent,
        origin: ExcerptDerived,
        excerpt: "<xsd:complexType> without <xsd:anyAttribute>",
    },
    Rule {
        id: STRAY_TEXT,
        description: "Character data other than whitespace inside element-only content.",
        schema_construct: UnknownContent,
        origin: ExcerptDerived,
        excerpt: r#"<xsd:complexType> without mixed="true""#,
    },
];

pub fn rule_catalogue() -> &'static [Rule] {
    CATALOGUE
}

pub fn find_rule(id: &str) -> Option<&'static Rule> {
    CATALOGUE.iter().find(|r| r.id == id)
}

/// Human-readable description of a rule with its schema reference.
pub fn explain(id: &str) -> Result<String, UnknownRule> {
    let rule = find_rule(id).ok_or_else(|| UnknownRule(id.to_owned()))?;
    Ok(format!(
        "{}\n  {}\n  construct: {:?}\n  origin: {}\n  schema: {}\n",
        rule.id, rule.description, rule.schema_construct, rule.origin, rule.excerpt
    ))
}
