from setuptools import setup

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="robust-localization",
    version="0.1.0",
    author="ebowwa",
    description="Exact robust-probability models, localization of risk measures and robust superhedging on finite spaces",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/ebowwa/robust-localization",
    packages=["robust_localization"],
    package_dir={"robust_localization": "src"},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.9",
    install_requires=[
        "sympy>=1.12",
        "pydantic>=2.5.0",
        "python-dotenv>=1.0.0",
    ],
    entry_points={
        "console_scripts": [
            "robloc=robust_localization.cli:main",
        ],
    },
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "hypothesis>=6.80.0",
            "httpx>=0.24.0",
            "fastapi>=0.100.0",
            "build>=0.10.0",
            "twine>=4.0.0",
        ],
        "api": [
            "fastapi>=0.100.0",
            "uvicorn>=0.23.0",
            "httpx>=0.24.0",
        ],
        "telemetry": [
            "opentelemetry-api>=1.20.0",
            "opentelemetry-sdk>=1.20.0",
            "opentelemetry-exporter-otlp>=1.20.0",
        ],
        "all": [
            "fastapi>=0.100.0",
            "uvicorn>=0.23.0",
            "httpx>=0.24.0",
            "opentelemetry-api>=1.20.0",
            "opentelemetry-sdk>=1.20.0",
            "opentelemetry-exporter-otlp>=1.20.0",
        ]
    }
)
