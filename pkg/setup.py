from setuptools import setup, find_packages

setup(
    name="devocr",
    version="0.1.0",
    description="Handwritten Devanagari character recognition - thinning, chain-code features and a CG-trained MLP",
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"dataset": ["prototypes.json"]},
    install_requires=[
        "numpy==1.26.4",
        "scipy==1.11.4",
        "pandas==2.1.4",
        "scikit-learn==1.3.2",
        "Pillow==10.2.0",
        "python-dotenv==1.0.0",
        "rich==13.7.0",
        "pydantic==2.6.1",
        "click==8.1.7",
    ],
    extras_require={
        "test": ["pytest==8.0.0", "hypothesis==6.98.0"],
    },
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "devocr=cli.devocr:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
    ],
)
